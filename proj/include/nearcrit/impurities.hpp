#pragma once
// Heavy-tailed holes: L-infinity balls of random radius removed before percolating.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nearcrit/percolation.hpp"

namespace nearcrit {

struct HoleParams {
    double m = 16.0;
    double alpha = 1.2;
    double beta = 1.5;
    double c1 = 1.0;
    double c2 = 1.0;
    double c3 = 1.0;

    void validate() const;
    double pi() const;              // min(1, c3 m^-beta)
    double tail(double r0) const;   // P(r >= r0)
    double radius(double u) const;  // inverse of the tail at u in (0, 1]
    bool operator==(const HoleParams&) const = default;
};

struct Hole {
    SiteCoord center;
    double radius = 0.0;
    bool operator==(const Hole&) const = default;
};

struct HoleConfig {
    HoleParams params;
    Window window;     // centers were drawn in window.inflated(pad)
    double pad = 0.0;
    std::vector<Hole> holes;
};

enum class PhaseDomain { I, II, III, IV };
const char* to_string(PhaseDomain d);

// Ties: alpha = 3/4 counts as outside (3/4, 2); beta = 3/4 counts as "beta <= 3/4".
PhaseDomain classify_domain(double alpha, double beta);
bool on_classifier_tie(double alpha, double beta);

struct HoleSampleOptions {
    std::optional<double> pad;                           // default 4 m
    std::function<double(SiteCoord)> multiplier;         // per-site factor on pi, clamped to [0, 1]
};

HoleConfig sample_holes(const Window& w, const HoleParams& params, std::uint64_t seed, const HoleSampleOptions& opt = {});
HoleConfig sample_holes(const Window& w, const HoleParams& params, Rng& rng, const HoleSampleOptions& opt = {});

bool hole_covers(const Hole& h, SiteCoord u);

// Sites covered by the holes with the given indices (all holes when subset is null) become vacant.
SiteConfig apply_holes(const SiteConfig& c, const HoleConfig& h, const std::vector<std::size_t>* subset = nullptr);
void apply_holes_inplace(SiteConfig& c, const std::vector<Hole>& holes);

enum class HoleEvent { H, Hbar, Hbarbar, Hbarbar_star, big_hole };
const char* to_string(HoleEvent e);
HoleEvent parse_hole_event(const std::string& s);

// Continuous geometry: with d = |center - z|_inf, the square hole meets the circle of radius n iff
// max(0, d - r) <= n <= d + r, and contains ball(n1) iff d + n1 <= r.
bool hole_event(const Hole& h, Point z, double n1, double n2, HoleEvent e);
bool detect_hole_crossing(const HoleConfig& h, const Window& a, HoleEvent e);

struct HoleBounds {
    double bound_H = 0.0;
    double bound_Hbarbar = 0.0;
};
// Union bounds summed explicitly over dyadic shells (H) and over sites with the admissible radius window (Hbarbar).
HoleBounds analytic_hole_bounds(const HoleParams& p, double n1, double n2);

struct W4Stats {
    int relevant = 0;        // holes left after the exact reductions
    std::int64_t nodes = 0;  // search nodes visited
    bool decided_early = false;
};

// Some subset of the holes, once applied, leaves the alternating four-arm event in the annulus.
bool detect_W4(const SiteConfig& c, const HoleConfig& h, const Window& a, int max_holes = 20, W4Stats* stats = nullptr);

// Plain subset search without the dual shortcut; slow, kept as a cross-check.
bool detect_W4_by_subsets(const SiteConfig& c, const HoleConfig& h, const Window& a);

struct W4Bracket {
    bool lower = false;  // witness found
    bool upper = false;  // two disjoint occupied arms without holes
    bool exact = false;  // lower == upper is the true value
    int relevant = 0;
};
// Exact answer when the search finishes within node_budget nodes (0 = unlimited), else the trivial bounds.
W4Bracket bracket_W4(const SiteConfig& c, const HoleConfig& h, const Window& a, int max_holes = 20,
                     std::int64_t node_budget = 0);

std::string to_json(const HoleConfig& h);
HoleConfig hole_config_from_json(const std::string& s);

}  // namespace nearcrit
