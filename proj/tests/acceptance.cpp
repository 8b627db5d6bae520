// Acceptance suite: one PASS/FAIL line per criterion.
// Usage: acceptance [criterion numbers...]   (default: all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "nearcrit/annulus.hpp"
#include "nearcrit/errors.hpp"
#include "nearcrit/experiments.hpp"
#include "nearcrit/forestfire.hpp"
#include "nearcrit/impurities.hpp"
#include "nearcrit/percolation.hpp"
#include "nearcrit/scales.hpp"
#include "nearcrit/stats.hpp"
#include "oracles.hpp"

using namespace nearcrit;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double limit_seconds;  // 0: no hard limit
    std::function<Outcome()> run;
};

int threads() { return std::max(1u, std::thread::hardware_concurrency()); }

std::string fmt(const char* f, double a = 0, double b = 0, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

SiteConfig from_bits(DomainPtr d, std::uint64_t bits) {
    SiteConfig c(d, 0);
    for (std::size_t i = 0; i < c.size(); ++i) c.state[i] = static_cast<std::int8_t>((bits >> i) & 1);
    return c;
}

bool closure_crossing(const SiteConfig& c, const std::vector<SiteCoord>& a, const std::vector<SiteCoord>& b, Color col) {
    const auto& s = c.domain->sites();
    std::vector<std::uint8_t> ok(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) ok[i] = has_color(c.state[i], col);
    const oracle::Closure cl(s, ok);
    for (auto u : a)
        for (auto v : b)
            if (cl(static_cast<std::size_t>(c.domain->index_of(u)), static_cast<std::size_t>(c.domain->index_of(v)))) return true;
    return false;
}

std::vector<int> bits_of(const ArmSpec& s) {
    std::vector<int> v;
    for (auto c : s.sigma) v.push_back(c == Color::occupied ? 1 : 0);
    return v;
}

std::vector<double> column(const ExperimentResult& r, const std::string& name) {
    const auto it = std::find(r.columns.begin(), r.columns.end(), name);
    if (it == r.columns.end()) throw std::runtime_error("no column " + name);
    const auto k = static_cast<std::size_t>(it - r.columns.begin());
    std::vector<double> out;
    for (const auto& row : r.rows) out.push_back(row[k].is_number() ? row[k].get<double>() : NAN);
    return out;
}

ExperimentResult suite(const std::string& name, const Json& params, std::uint64_t seed) {
    ExperimentConfig c;
    c.name = name;
    c.params = params;
    c.seed = seed;
    c.threads = threads();
    return run_experiment(c);
}

std::string list(const std::vector<double>& v, const char* f = "%.4g") {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(f, v[i]);
    return s + "]";
}

double max_over_min(const std::vector<double>& v) {
    return *std::max_element(v.begin(), v.end()) / *std::min_element(v.begin(), v.end());
}

Json domain_one() {
    const Json d = experiment_defaults("hole-crossing");
    Json out;
    for (const char* k : {"alpha", "beta", "c1", "c2", "c3"}) out[k] = d.at(k);
    return out;
}

// ---------------------------------------------------------------------------------------------

Outcome duality() {
    const Window w = Window::parallelogram({0, 0}, 32, 32);
    const auto d = Domain::make(w);
    Rng rng(101);
    std::int64_t total = 0, good = 0;
    for (double p : {0.3, 0.5, 0.7})
        for (int t = 0; t < 10000; ++t) {
            const auto c = sample(d, p, rng);
            ++total;
            good += detect_crossing(c, w, Orientation::horizontal, Color::occupied) !=
                    detect_crossing(c, w, Orientation::vertical, Color::vacant);
        }
    return {good == total, fmt("%.0f/%.0f samples with exactly one crossing", good, total)};
}

Outcome oracles() {
    std::int64_t checks = 0, bad = 0;
    auto expect = [&](bool a, bool b) { ++checks, bad += a != b; };

    // Crossings: every configuration of windows with at most 18 sites, then random larger windows.
    auto crossing_all = [&](const SiteConfig& c, const Window& w) {
        const auto L = boundary(w, BoundarySide::left), R = boundary(w, BoundarySide::right);
        const auto B = boundary(w, BoundarySide::bottom), T = boundary(w, BoundarySide::top);
        for (Color col : {Color::occupied, Color::vacant}) {
            expect(detect_crossing(c, w, Orientation::horizontal, col), closure_crossing(c, L, R, col));
            expect(detect_crossing(c, w, Orientation::vertical, col), closure_crossing(c, B, T, col));
        }
    };
    for (const Window& w : {Window::parallelogram({0, 0}, 4, 4), Window::parallelogram({0, 0}, 6, 3), Window::rectangle(0, 3.6, 0, 2.7)}) {
        const auto d = Domain::make(w);
        if (d->size() > 18) return {false, "exhaustive window too large"};
        for (std::uint64_t b = 0; b < (std::uint64_t{1} << d->size()); ++b) crossing_all(from_bits(d, b), w);
    }
    Rng rng(202);
    for (const Window& w : {Window::parallelogram({0, 0}, 8, 8), Window::rectangle(0, 10, 0, 7)}) {
        const auto d = Domain::make(w);
        for (int t = 0; t < 500; ++t) crossing_all(sample(d, 0.3 + 0.4 * rng.uniform(), rng), w);
    }

    // Circuits: winding-cycle oracle.
    auto circuit_all = [&](const SiteConfig& c, const Window& a) {
        for (Color col : {Color::occupied, Color::vacant}) {
            std::vector<std::uint8_t> ok(c.size());
            for (std::size_t i = 0; i < c.size(); ++i) ok[i] = has_color(c.state[i], col);
            expect(detect_circuit(c, a, col), oracle::has_winding_cycle(c.domain->sites(), ok, a.center()));
        }
    };
    {
        const Window a = Window::annulus(1, 2);
        const auto d = Domain::make(a);
        for (std::uint64_t b = 0; b < (std::uint64_t{1} << d->size()); ++b) circuit_all(from_bits(d, b), a);
        for (const Window& big : {Window::annulus(1, 3), Window::annulus(2, 5)}) {
            const auto db = Domain::make(big);
            for (int t = 0; t < 500; ++t) circuit_all(sample(db, 0.3 + 0.4 * rng.uniform(), rng), big);
        }
    }

    // Arm events: minimal-path oracle.
    const char* specs[] = {"o", "v", "oo", "ov", "vv", "ooo", "oov", "ovov", "oovv", "ooov", "oovov", "ovovov", "vvvo"};
    auto arms_all = [&](const SiteConfig& c, const Window& a, const oracle::ArmOracle& orc) {
        for (const char* s : specs) {
            const auto spec = ArmSpec::parse(s);
            expect(detect_arm_event(c, a, spec), orc.event(c.state, bits_of(spec)));
        }
    };
    {
        const Window a = Window::annulus(1, 2);
        const auto d = Domain::make(a);
        const oracle::ArmOracle orc(d->sites(), a.center(), a.n1(), a.n2());
        for (std::uint64_t b = 0; b < (std::uint64_t{1} << d->size()); ++b) arms_all(from_bits(d, b), a, orc);
        const Window big = Window::annulus(1, 3);
        const auto db = Domain::make(big);
        const oracle::ArmOracle orb(db->sites(), big.center(), big.n1(), big.n2());
        for (int t = 0; t < 500; ++t) arms_all(sample(db, 0.3 + 0.4 * rng.uniform(), rng), big, orb);
    }
    return {bad == 0, fmt("%.0f disagreements in %.0f comparisons", bad, checks)};
}

Outcome critical_point() {
    const Window w = Window::parallelogram({0, 0}, 64, 64);
    const auto d = Domain::make(w);
    const auto e = estimate_event([&](Rng& rng) { return detect_crossing(sample(d, 0.5, rng), w, Orientation::horizontal, Color::occupied); },
                                  20000, 303, threads());
    const double z = (e.p_hat - 0.5) / e.std_err;
    return {std::abs(z) <= 4, fmt("P = %.4f +- %.4f (%.2f std errors from 1/2)", e.p_hat, e.std_err, z)};
}

Outcome arm_exponents() {
    const auto r = suite("arm-exponents", {{"p", 0.5}, {"n1", 1.0}, {"ns", {8, 16, 32, 64, 128, 256}}, {"samples", 50000}}, 404);
    const auto ns = column(r, "n"), p1 = column(r, "pi1"), p4 = column(r, "pi4");
    std::vector<double> x, y1, y4, w;
    for (std::size_t i = 0; i < ns.size(); ++i) x.push_back(std::log(ns[i])), y1.push_back(std::log(p1[i])), y4.push_back(std::log(p4[i])), w.push_back(1);
    const double s1 = weighted_line_fit(x, y1, w).slope, s4 = weighted_line_fit(x, y4, w).slope;
    const bool ok = s1 >= -0.16 && s1 <= -0.06 && s4 >= -1.45 && s4 <= -1.05;
    return {ok, fmt("pi1 slope %.4f (target -0.104), pi4 slope %.4f (target -1.25); pi4 ", s1, s4) + list(p4)};
}

Outcome kesten() {
    const auto r = suite("kesten-relation", {{"ps", {0.52, 0.54, 0.56, 0.58, 0.60}}, {"L_budget", 200000}, {"arm_samples", 50000}}, 505);
    const auto prod = column(r, "product"), L = column(r, "L_hat");
    if (prod.size() != 5) return {false, "incomplete grid"};
    const double q = max_over_min(prod);
    return {q <= 3, fmt("max/min %.3f; L ", q) + list(L, "%.0f") + " product " + list(prod)};
}

Outcome hole_crossing() {
    Json p = domain_one();
    p["ms"] = {16, 32, 64}, p["n1s"] = {4, 8, 16}, p["samples"] = 10000;
    const auto r = suite("hole-crossing", p, 606);
    const auto ph = column(r, "p_hat"), b = column(r, "bound_H");
    int viol = 0;
    double worst = 0;
    for (std::size_t i = 0; i < ph.size(); ++i) {
        viol += ph[i] > b[i];
        worst = std::max(worst, ph[i] / b[i]);
    }
    return {viol == 0 && ph.size() == 9, fmt("%.0f violations over %.0f points; max P/bound %.3f", viol, static_cast<double>(ph.size()), worst)};
}

Outcome w4_sandwich() {
    const Window a = Window::annulus(2, 8);
    const auto d = Domain::make(Window::ball(9));
    const auto o4 = ArmSpec::parse("ovov"), oo = ArmSpec::parse("oo");
    Rng rng(707);
    int bad = 0, undecided = 0, w4 = 0, strict = 0;
    for (int t = 0; t < 1000; ++t) {
        const double p = 0.45 + 0.2 * rng.uniform();
        const auto c = sample(d, p, rng);
        const HoleParams hp{4, 1.2, 1.5, 1, 1, 1 + 3 * rng.uniform()};
        HoleSampleOptions opt;
        opt.pad = 2.0;
        const auto h = sample_holes(c.window(), hp, rng, opt);
        bool w;
        try {
            w = detect_W4(c, h, a);
        } catch (const TooManyHoles&) {
            ++undecided;
            continue;
        }
        const bool plain = detect_arm_event(c, a, o4), holed = detect_arm_event(apply_holes(c, h), a, o4);
        if ((plain || holed) && !w) ++bad;
        if (w && !detect_arm_event(c, a, oo)) ++bad;
        w4 += w;
        strict += w && !plain && !holed;
    }
    return {bad == 0 && undecided == 0,
            fmt("%.0f violations, %.0f undecided; W4 in %.0f instances (%.0f without A4 at either end)", bad, undecided, w4, strict)};
}

Outcome four_arm_stability() {
    Json p = domain_one();
    p["ms"] = {16, 32, 64}, p["n1"] = 2.0, p["samples"] = 400, p["pi4_samples"] = 20000, p["max_holes"] = 20, p["node_budget"] = 0;
    const auto r = suite("four-arm-stability", p, 808);
    const auto ratio = column(r, "ratio"), inexact = column(r, "inexact");
    double inex = 0;
    for (double v : inexact) inex += v;
    if (ratio.size() != 3) return {false, "incomplete grid"};
    const double q = max_over_min(ratio);
    return {q <= 3, fmt("ratios ") + list(ratio) + fmt(" max/min %.3f; %.0f inexact W4 decisions", q, inex)};
}

Outcome vacant_nonstability() {
    Json p = domain_one();
    p["alpha"] = 1.2, p["beta"] = 1.25;
    p["ms"] = {16, 32, 64}, p["n1"] = 2.0, p["samples"] = 4000, p["plain_samples"] = 20000;
    const auto r = suite("vacant-arm-nonstability", p, 909);
    const auto ratio = column(r, "ratio");
    if (ratio.size() != 3) return {false, "incomplete grid"};
    bool ok = true;
    std::vector<double> g;
    for (std::size_t i = 1; i < ratio.size(); ++i) {
        g.push_back(ratio[i] / ratio[i - 1]);
        ok = ok && g.back() >= 1.2;
    }
    return {ok, "ratios " + list(ratio) + " growth per doubling " + list(g, "%.3f")};
}

Outcome ffwor_invariants() {
    int bad = 0;
    std::int64_t burns = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        FireOptions o;
        o.region = Window::ball(32);
        o.zeta = 0.01;
        o.t_end = 2.0;
        o.record_snapshots = true;
        const auto tl = simulate_ffwor(o, seed);
        burns += static_cast<std::int64_t>(tl.burns.size());
        if (tl.snapshots.size() != tl.burns.size()) ++bad;
        for (std::size_t k = 0; k < tl.burns.size() && k < tl.snapshots.size(); ++k) {
            SiteConfig snap(tl.final.domain, 0);
            snap.state = tl.snapshots[k];
            const auto lab = label_clusters(snap, Color::occupied);
            const auto target = lab.label[static_cast<std::size_t>(tl.burns[k].ignited)];
            std::vector<index_t> cl;
            for (std::size_t i = 0; i < snap.size(); ++i)
                if (target >= 0 && lab.label[i] == target) cl.push_back(static_cast<index_t>(i));
            if (cl != tl.burns[k].sites) ++bad;
        }
        std::vector<double> times{0.0, 2.0};
        for (const auto& b : tl.burns) times.push_back(b.time - 1e-12), times.push_back(b.time);
        std::sort(times.begin(), times.end());
        SiteConfig prev = tl.state_at(0.0);
        for (double t : times) {
            const auto cur = tl.state_at(t);
            for (std::size_t i = 0; i < cur.size(); ++i) {
                const auto a = prev.state[i], b = cur.state[i];
                if ((a == 1 && b == 0) || (a == -1 && b != -1)) ++bad;
            }
            prev = cur;
        }
        if (tl.state_at(2.0).state != tl.final.state) ++bad;
        const auto again = simulate_ffwor(o, seed);
        if (timeline_json(again) != timeline_json(tl)) ++bad;
        FireOptions z = o;
        z.zeta = 0;
        z.record_snapshots = false;
        const auto pure = simulate_ffwor(z, seed);
        if (!pure.burns.empty() || pure.final.state != simulate_pure_birth(o.region, 2.0, seed).state) ++bad;
    }
    return {bad == 0, fmt("%.0f violations over 100 trajectories (%.0f burns)", bad, static_cast<double>(burns))};
}

Outcome frozen() {
    const std::int64_t N = 100;
    int bad = 0;
    std::int64_t frozen_total = 0, largest = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto f = simulate_frozen(Window::ball(64), N, seed);
        const auto lab = label_clusters(f.config, Color::occupied);
        std::int64_t big = 0;
        for (auto s : lab.size) {
            largest = std::max(largest, s);
            if (s > 6 * (N - 1) + 1) ++bad;
            big += s >= N;
        }
        for (const auto& fc : f.frozen) bad += fc.size < N;
        if (big != static_cast<std::int64_t>(f.frozen.size())) ++bad;
        frozen_total += static_cast<std::int64_t>(f.frozen.size());
    }
    return {bad == 0, fmt("%.0f violations; %.0f frozen clusters, largest %.0f (cap %.0f)", bad, static_cast<double>(frozen_total),
                          static_cast<double>(largest), static_cast<double>(6 * (N - 1) + 1))};
}

Outcome domination() {
    const Window w = Window::ball(48);
    const double zeta = 0.005;
    std::string detail;
    bool ok = true;
    const double ts[] = {kTc - 0.1, kTc, kTc + 0.1};
    std::vector<std::vector<double>> diff(3), sig(3), y(3);
    for (std::uint64_t run = 0; run < 200; ++run) {
        const std::uint64_t seed = replica_seed(1212, run);
        FireOptions o;
        o.region = w;
        o.zeta = zeta;
        o.t_end = ts[2];
        const auto tl = simulate_ffwor(o, seed);
        for (int k = 0; k < 3; ++k) {
            const auto s = tl.state_at(ts[k]);
            const auto yr = simulate_Y(w, zeta, ts[k], seed);
            const double ds = static_cast<double>(s.count(1)) / static_cast<double>(s.size());
            const double dy = static_cast<double>(yr.config.count(1)) / static_cast<double>(yr.config.size());
            sig[k].push_back(ds), y[k].push_back(dy), diff[k].push_back(ds - dy);
        }
    }
    for (int k = 0; k < 3; ++k) {
        const MeanSe a = mean_se(sig[k]), b = mean_se(y[k]);
        const double se = joint_se(a.se, b.se);
        ok = ok && a.mean >= b.mean - 3 * se;
        detail += fmt("t=tc%+.1f: sigma %.4f Y %.4f joint se %.4f", ts[k] - kTc, a.mean, b.mean, se) +
                  fmt(" paired se %.4f; ", mean_se(diff[k]).se);
    }
    return {ok, detail};
}

Outcome scales_exact() {
    bool ok = delta_k_exact(1) == Rational(3, 8);
    std::string detail = ok ? "delta_1 = 3/8 exactly; " : "delta_1 != 3/8; ";
    const auto b = ScaleBackend::analytic();
    std::vector<double> c;
    double worst = 0;
    for (double zeta : {1e-3, 1e-4, 1e-5, 1e-6}) {
        const auto t = exceptional_sequence(zeta, 5, b);
        c.push_back(t.rows[1].m_k * std::sqrt(zeta));
        for (int k = 1; k <= 5; ++k) {
            const double e = t.rows[k - 1].eps_k, m = t.rows[k].m_k;
            worst = std::max(worst, std::abs(zeta * e * m * m * b.theta(e) - 1));
        }
    }
    const double spread = max_over_min(c) - 1;
    ok = ok && spread < 1e-6 && worst < 1e-6;
    return {ok, detail + fmt("m1 sqrt(zeta) = %.9f, relative spread %.2e; max recursion residual %.2e", c[0], spread, worst)};
}

Outcome exceptional_trend() {
    const auto r = suite("exceptional-scale-burning",
                         {{"zetas", {4e-3, 1e-3, 2.5e-4}}, {"runs", 500}, {"exponent_m1", 0.5}, {"exponent_mid", 0.58}, {"t_lo_offset", 0.1}, {"t_hi_offset", 0.6}},
                         1414);
    const auto ex = column(r, "box_exponent"), pb = column(r, "p_burn"), side = column(r, "side");
    std::vector<double> small, mid, ss, sm;
    for (std::size_t i = 0; i < ex.size(); ++i) {
        (ex[i] == 0.5 ? small : mid).push_back(pb[i]);
        (ex[i] == 0.5 ? ss : sm).push_back(side[i]);
    }
    if (small.size() != 3 || mid.size() != 3) return {false, "incomplete grid"};
    bool ok = std::all_of(small.begin(), small.end(), [](double v) { return v >= 0.02; });
    for (std::size_t i = 1; i < mid.size(); ++i) ok = ok && mid[i] < mid[i - 1];
    return {ok, "sides " + list(ss, "%.0f") + " P " + list(small, "%.3f") + "; sides " + list(sm, "%.0f") + " P " + list(mid, "%.3f")};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all = {
        {1, "duality exactness", 60, duality},
        {2, "brute-force oracle equivalence", 300, oracles},
        {3, "critical point", 120, critical_point},
        {4, "arm exponents", 0, arm_exponents},
        {5, "Kesten relation", 0, kesten},
        {6, "hole-crossing bound", 300, hole_crossing},
        {7, "W4 sandwich and witness", 120, w4_sandwich},
        {8, "four-arm stability trend", 0, four_arm_stability},
        {9, "vacant-arm non-stability", 0, vacant_nonstability},
        {10, "FFWoR structural invariants", 180, ffwor_invariants},
        {11, "frozen percolation caps", 180, frozen},
        {12, "coupling domination", 0, domination},
        {13, "scales exactness", 1, scales_exact},
        {14, "exceptional-scale trend", 0, exceptional_trend},
    };
    std::vector<int> pick;
    for (int i = 1; i < argc; ++i) pick.push_back(std::atoi(argv[i]));
    int failed = 0, ran = 0;
    for (const auto& c : all) {
        if (!pick.empty() && std::find(pick.begin(), pick.end(), c.id) == pick.end()) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.limit_seconds > 0 && secs > c.limit_seconds) {
            o.pass = false;
            o.detail += fmt(" [over the %.0f s limit]", c.limit_seconds);
        }
        ++ran;
        failed += !o.pass;
        std::printf("criterion %2d %s  %-32s %8.1fs  %s\n", c.id, o.pass ? "PASS" : "FAIL", c.name, secs, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%d criteria passed\n", ran - failed, ran);
    return failed ? 1 : 0;
}
