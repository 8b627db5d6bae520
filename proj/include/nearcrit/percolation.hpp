#pragma once
// Bernoulli site percolation: configurations, cluster labels, crossings, circuits, arms, nets, estimators.

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "nearcrit/domain.hpp"
#include "nearcrit/rng.hpp"

namespace nearcrit {

enum class Color : std::int8_t { vacant = 0, occupied = 1 };

// Burnt (-1) reads as vacant.
inline bool has_color(std::int8_t s, Color c) { return (s == 1) == (c == Color::occupied); }

struct SiteConfig {
    DomainPtr domain;
    std::vector<std::int8_t> state;
    std::vector<double> birth_time;  // empty, or one entry per site (NaN when unset)
    std::vector<double> burn_time;

    SiteConfig() = default;
    SiteConfig(DomainPtr d, std::int8_t fill);

    const Window& window() const { return domain->window(); }
    std::size_t size() const { return state.size(); }
    std::int8_t at(SiteCoord v) const;
    void set(SiteCoord v, std::int8_t s);
    // States copied onto the sites of w, which must lie inside this configuration's window.
    SiteConfig restricted(const Window& w) const;
    std::int64_t count(std::int8_t s) const;
};

struct ClusterLabeling {
    Color color = Color::occupied;
    std::vector<std::int32_t> label;  // -1 for sites of the other color
    std::vector<std::int64_t> size;   // indexed by label
};

struct ArmSpec {
    std::vector<Color> sigma;

    static ArmSpec parse(const std::string& s);  // e.g. "ovov"
    static ArmSpec alternating(int k);
    std::string str() const;
    std::size_t k() const { return sigma.size(); }
};

struct EstimateResult {
    double p_hat = 0.0;
    double std_err = 0.0;
    std::int64_t n_samples = 0;
    std::uint64_t seed = 0;

    static EstimateResult from_counts(std::int64_t hits, std::int64_t n, std::uint64_t seed);
};

enum class Orientation { horizontal, vertical };

SiteConfig sample(const Window& w, double p, std::uint64_t seed);
SiteConfig sample(DomainPtr d, double p, Rng& rng);
void resample(SiteConfig& c, double p, Rng& rng);

ClusterLabeling label_clusters(const SiteConfig& c, Color color);

bool detect_crossing(const SiteConfig& c, const Window& r, Orientation o, Color color);

// Path of the color from the sites next to the inner ball to the inner boundary of the outer ball.
bool detect_radial_crossing(const SiteConfig& c, const Window& a, Color color);
bool detect_circuit(const SiteConfig& c, const Window& a, Color color);
bool detect_arm_event(const SiteConfig& c, const Window& a, const ArmSpec& spec);

// Rectangles of the net family meeting ball(n); each must be crossed in its long direction.
struct NetRect {
    Window rect;
    Orientation long_direction;
};
std::vector<NetRect> net_rectangles(double n, double kappa);
bool detect_net(const SiteConfig& c, double n, double kappa);

using EventFn = std::function<bool(Rng&)>;
// Replica r runs with Rng(replica_seed(seed, r)); threads only change wall time.
EstimateResult estimate_event(const EventFn& event, std::int64_t n_samples, std::uint64_t seed, int threads = 1);

struct LSearchOptions {
    std::int64_t batch = 2000;
    double threshold = 0.001;
    double upper_guard = 0.002;
    double lower_guard = 0.0005;
    double z = 2.5758293035489004;  // two-sided 99%
    std::int64_t max_n = 1 << 14;
    int threads = 1;
};

struct LTrace {
    std::int64_t n;
    std::int64_t hits;
    std::int64_t samples;
    bool small;
};

// Smallest n with P_p(Cv([0,2n]x[0,n])) <= 0.001; mc_budget caps the samples spent at a single n.
std::int64_t estimate_L(double p, std::int64_t mc_budget, std::uint64_t seed, const LSearchOptions& opt = {},
                        std::vector<LTrace>* trace = nullptr);

// Probability of an occupied vertical crossing of [0,2n]x[0,n].
EstimateResult estimate_crossing(double p, std::int64_t n, std::int64_t n_samples, std::uint64_t seed,
                                 int threads = 1);

// P_p(origin connected to the inner boundary of ball(n)).
EstimateResult estimate_theta(double p, std::int64_t n, std::int64_t n_samples, std::uint64_t seed, int threads = 1);

// P_p(A_sigma(annulus(n1, n2))).  One-arm and alternating four-arm events use lazy cluster exploration.
EstimateResult estimate_arm(double p, double n1, double n2, const ArmSpec& spec, std::int64_t n_samples,
                            std::uint64_t seed, int threads = 1);

// Largest occupied cluster of c restricted to w (ties: smallest id).
std::pair<std::int32_t, std::int64_t> largest_cluster(const SiteConfig& c, const Window& w);

// Exploration-based arm test on a given configuration: at least `need` distinct occupied clusters cross a.
// need = 1 is the one-arm event, need = 2 the alternating four-arm event.
bool occupied_crossing_clusters_at_least(const SiteConfig& c, const Window& a, int need);

}  // namespace nearcrit
