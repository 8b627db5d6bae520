#include "nearcrit/domain.hpp"

#include <algorithm>

namespace nearcrit {

Domain::Domain(const Window& w) : window_(w), sites_(sites_in(w)) {
    if (!sites_.empty()) {
        xmin_ = xmax_ = sites_[0].x;
        ymin_ = sites_.front().y;
        ymax_ = sites_.back().y;
        for (auto v : sites_) xmin_ = std::min(xmin_, v.x), xmax_ = std::max(xmax_, v.x);
        stride_ = xmax_ - xmin_ + 1;
        lookup_.assign(static_cast<std::size_t>(stride_) * static_cast<std::size_t>(ymax_ - ymin_ + 1), kNone);
        for (std::size_t i = 0; i < sites_.size(); ++i)
            lookup_[static_cast<std::size_t>(sites_[i].y - ymin_) * static_cast<std::size_t>(stride_) +
                    static_cast<std::size_t>(sites_[i].x - xmin_)] = static_cast<index_t>(i);
    }
    nbr_.resize(sites_.size() * 6);
    for (std::size_t i = 0; i < sites_.size(); ++i)
        for (int k = 0; k < 6; ++k)
            nbr_[i * 6 + static_cast<std::size_t>(k)] =
                index_of({sites_[i].x + kNeighborOffsets[k].x, sites_[i].y + kNeighborOffsets[k].y});
}

bool Domain::on_inner_boundary(index_t i) const {
    const index_t* nb = neighbors(i);
    for (int k = 0; k < 6; ++k)
        if (nb[k] == kNone) return true;
    return false;
}

std::vector<index_t> embed_indices(const Domain& sub, const Domain& super) {
    std::vector<index_t> map(sub.size());
    for (std::size_t i = 0; i < sub.size(); ++i) map[i] = super.index_of(sub.sites()[i]);
    return map;
}

}  // namespace nearcrit
