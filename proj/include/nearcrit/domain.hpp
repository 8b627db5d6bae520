#pragma once
// Finite window indexed row-major, with a dense coordinate lookup and a neighbor table.

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "nearcrit/lattice.hpp"

namespace nearcrit {

using index_t = std::int32_t;
inline constexpr index_t kNone = -1;

class Domain {
public:
    explicit Domain(const Window& w);
    static std::shared_ptr<const Domain> make(const Window& w) { return std::make_shared<const Domain>(w); }

    const Window& window() const { return window_; }
    std::size_t size() const { return sites_.size(); }
    const std::vector<SiteCoord>& sites() const { return sites_; }
    SiteCoord site(index_t i) const { return sites_[static_cast<std::size_t>(i)]; }

    index_t index_of(SiteCoord v) const {
        if (v.x < xmin_ || v.x > xmax_ || v.y < ymin_ || v.y > ymax_) return kNone;
        return lookup_[static_cast<std::size_t>(v.y - ymin_) * static_cast<std::size_t>(stride_) +
                       static_cast<std::size_t>(v.x - xmin_)];
    }
    bool contains(SiteCoord v) const { return index_of(v) != kNone; }

    // k-th neighbor in the order of kNeighborOffsets, or kNone when outside.
    index_t neighbor(index_t i, int k) const { return nbr_[static_cast<std::size_t>(i) * 6 + static_cast<std::size_t>(k)]; }
    const index_t* neighbors(index_t i) const { return &nbr_[static_cast<std::size_t>(i) * 6]; }

    // Sites with a neighbor outside the domain.
    bool on_inner_boundary(index_t i) const;

    // Axial bounding box of the sites (empty domain: xmin > xmax).
    std::int32_t xmin() const { return xmin_; }
    std::int32_t xmax() const { return xmax_; }
    std::int32_t ymin() const { return ymin_; }
    std::int32_t ymax() const { return ymax_; }

private:
    Window window_;
    std::vector<SiteCoord> sites_;
    std::int32_t xmin_ = 0, xmax_ = -1, ymin_ = 0, ymax_ = -1, stride_ = 0;
    std::vector<index_t> lookup_;
    std::vector<index_t> nbr_;
};

using DomainPtr = std::shared_ptr<const Domain>;

// Map from sites of `sub` to indices of `super` (kNone where absent).
std::vector<index_t> embed_indices(const Domain& sub, const Domain& super);

}  // namespace nearcrit
