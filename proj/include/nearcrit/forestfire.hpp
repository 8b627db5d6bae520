#pragma once
// Event-driven forest fires without recovery (and with), pure birth, the Y-process, frozen percolation,
// the hole-law measurement of the ignition process and burning-probability estimators.

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "nearcrit/percolation.hpp"

namespace nearcrit {

// Per-site streams depend only on (seed, tag, x, y), so a site keeps its clocks across windows.
enum class Stream : std::uint64_t { birth = 1, ignition = 2, rebirth = 3, frozen = 4, y_cluster = 5 };
std::uint64_t site_stream(std::uint64_t seed, Stream tag, SiteCoord v, std::uint64_t counter = 0);
double birth_time(std::uint64_t seed, SiteCoord v);                                 // Exp(1)
std::vector<double> ignition_marks(std::uint64_t seed, SiteCoord v, double zeta, double t_end);  // Poisson(zeta) on [0, t_end]

struct FireOptions {
    Window region = Window::ball(32);
    double zeta = 0.01;
    double t_end = 2.0;                          // may be infinite without recovery: run until everything burnt
    std::optional<double> stop_ignitions_at;     // ignitions after s are discarded
    bool burn_boundary = false;                  // the outer boundary of a burnt cluster never becomes occupied
    bool recovery = false;                       // burnt sites become vacant and are born again after Exp(1)
    bool record_snapshots = false;               // keep pre-burn copies of the state (checks only)
};

struct BurnEvent {
    double time;
    index_t ignited;
    std::vector<index_t> sites;  // sorted
};

struct BirthEvent {
    double time;
    index_t site;
};

struct FireTimeline {
    FireOptions opts;
    std::uint64_t seed = 0;
    std::vector<double> birth_time;                 // first birth per site
    std::vector<std::vector<double>> ignitions;     // marks per site on [0, min(t_end, s)]
    std::vector<BirthEvent> rebirths;               // recovery only
    std::vector<BurnEvent> burns;
    std::vector<double> scar_time;                  // burn_boundary: when the site was frozen vacant (inf if never)
    std::vector<std::vector<std::int8_t>> snapshots;  // with record_snapshots, state just before each burn
    SiteConfig final;
    double end_time = 0;                            // time of the last processed event when t_end is infinite

    // States at time t (burnt = -1; with recovery burnt sites read 0).
    SiteConfig state_at(double t) const;
};

SiteConfig simulate_pure_birth(const Window& w, double t, std::uint64_t seed);
FireTimeline simulate_ffwor(const FireOptions& opts, std::uint64_t seed);

void write_burn_csv(std::ostream& os, const FireTimeline& tl);
std::string timeline_json(const FireTimeline& tl);
// Replay data only: options, seed, burns, rebirths and the final configuration (ignition lists stay empty).
FireTimeline timeline_from_json(const std::string& s);

// Calibrated fit of estimate_L: L(p) ~ 2.14 |p - 1/2|^-4/3.
double L_fit(double p);

struct YOptions {
    std::optional<double> pad;                        // default min(2 L_fit(p(tau)), max_pad)
    std::optional<double> max_pad;                    // default 2 * window radius
};

struct YResult {
    SiteConfig config;
    std::int64_t marks = 0;
    std::int64_t clipped = 0;   // cluster explorations that reached the padded window boundary
};

YResult simulate_Y(const Window& w, double zeta, double t, std::uint64_t seed, const YOptions& opt = {});

inline constexpr std::int64_t kFrozenNever = std::numeric_limits<std::int64_t>::max();

struct MergeRecord {
    index_t site;
    double time;
    std::vector<std::int64_t> parts;  // sizes of the distinct neighbouring clusters joined
    std::int64_t size;                // size after the merge
};

struct FrozenCluster {
    index_t root;
    std::int64_t size;
    double time;  // when it reached size N
};

struct FrozenResult {
    SiteConfig config;  // birth_time holds tau_v
    std::vector<FrozenCluster> frozen;
    std::vector<MergeRecord> merges;
    std::int64_t blocked = 0;  // births refused
};

// N-volume-frozen percolation with uniform [0, 1] birth times; N = kFrozenNever disables freezing.
FrozenResult simulate_frozen(const Window& w, std::int64_t N, std::uint64_t seed);

struct RhoPiOptions {
    double c1 = 1.0, c2 = 1.0, upsilon = 0.01;
    std::optional<double> m;  // default L_fit(p(t_c - eps))
    std::vector<double> r_grid;  // default 1, 2, 4, ... up to the largest radius
};

struct RhoPi {
    double T = 0;            // t_c - eps
    double m = 0;
    double pi_hat = 0, pi_se = 0, pi_expected = 0;
    std::int64_t sites = 0, ignited = 0, clipped = 0;
    std::vector<double> radii;  // max closed-cluster radius per ignited site
    std::vector<double> r_grid, rho_hat, envelope;
};

RhoPi measure_rho_pi(double zeta, double eps, const Window& w, int n_runs, std::uint64_t seed, const RhoPiOptions& opt = {});

struct BurnFamily {
    enum class Kind { box, circuits } kind = Kind::box;
    double n = 32;                    // box side; the process runs on ball(n / 2)
    double n1 = 8, n2 = 32;           // circuits: boundaries of ball(r), r on a geometric grid in [n1, n2]
    int grid = 4;
    static BurnFamily box(double side) { return {Kind::box, side, 0, 0, 0}; }
    static BurnFamily circuits(double a, double b, int k = 4) { return {Kind::circuits, 0, a, b, k}; }
};

struct BurnEstimate {
    EstimateResult box;                                 // box form
    std::vector<std::pair<double, EstimateResult>> per_radius;  // circuit proxy
    EstimateResult min, max;
    bool proxy = false;
};

// Probability that the origin turns burnt during [t_lo, t_hi].
BurnEstimate estimate_burning_prob(double zeta, const BurnFamily& fam, double t_lo, double t_hi, int n_runs,
                                   std::uint64_t seed, int threads = 1);

}  // namespace nearcrit
