#pragma once
// Cluster structure of a configuration inside an annulus: crossing clusters, their cyclic order,
// and vertex-disjoint crossing counts.

#include <cstdint>
#include <vector>

#include "nearcrit/percolation.hpp"

namespace nearcrit {

inline constexpr std::uint8_t kInnerRim = 1;  // next to the inner ball
inline constexpr std::uint8_t kOuterRim = 2;  // next to the outside of the outer ball

struct AnnulusGeometry {
    DomainPtr dom;
    std::vector<std::uint8_t> rim;
    std::vector<double> angle;  // of the embedded site around the center, in [0, 2 pi)

    static AnnulusGeometry make(const Window& a);
};

struct AnnulusClusters {
    std::vector<std::int32_t> label;    // per annulus site
    std::vector<Color> color;           // per cluster
    std::vector<std::uint8_t> touches;  // per cluster, rim bits
    std::vector<double> angle;          // per cluster, angle of its first inner contact
    std::vector<std::int32_t> crossing; // crossing clusters in counter-clockwise order
};

// states are annulus-indexed.
AnnulusClusters analyze_annulus(const AnnulusGeometry& g, const std::int8_t* states);

// Maximum number of vertex-disjoint rim-to-rim paths inside the site set `mask`, capped at `cap`.
int disjoint_crossing_count(const AnnulusGeometry& g, const std::vector<std::uint8_t>& mask, int cap);

// Vertex sets of a maximum family of disjoint crossings (at most cap); `order_seed` permutes the search order.
std::vector<std::vector<index_t>> disjoint_crossing_paths(const AnnulusGeometry& g, const std::vector<std::uint8_t>& mask,
                                                          int cap, std::uint64_t order_seed = 0);

// Two disjoint crossings minimizing the summed per-site cost (empty when fewer than two exist).
std::vector<std::vector<index_t>> cheapest_crossing_pair(const AnnulusGeometry& g, const std::vector<std::uint8_t>& mask,
                                                         const std::vector<double>& cost);

// Number of connected components of `mask` touching both rims, stopping once `cap` is reached.
int crossing_component_count(const AnnulusGeometry& g, const std::vector<std::uint8_t>& mask, int cap);

// Annulus-indexed copy of the states of c (throws if the annulus leaves c's window).
std::vector<std::int8_t> annulus_states(const SiteConfig& c, const AnnulusGeometry& g);

bool arm_event(const AnnulusGeometry& g, const std::int8_t* states, const ArmSpec& spec);

}  // namespace nearcrit
