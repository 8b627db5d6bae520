#include "nearcrit/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>

#include "nearcrit/errors.hpp"
#include "nearcrit/forestfire.hpp"
#include "nearcrit/impurities.hpp"
#include "nearcrit/scales.hpp"
#include "nearcrit/stats.hpp"

namespace nearcrit {

bool ExperimentResult::passed() const {
    return !partial && std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.passed; });
}

Json ExperimentResult::summary() const {
    Json as = Json::array();
    for (const auto& a : assertions) as.push_back({{"name", a.name}, {"passed", a.passed}, {"detail", a.detail}});
    return {{"name", name},      {"seed", seed},         {"config_hash", config_hash}, {"params", params},
            {"partial", partial}, {"elapsed_s", elapsed}, {"stats", stats},            {"assertions", as},
            {"passed", passed()}, {"rows", rows.size()}};
}

void write_experiment_csv(std::ostream& os, const ExperimentResult& r) {
    write_header(os, {{"experiment", r.name}, {"seed", r.seed}, {"config_hash", r.config_hash}, {"params", r.params.dump()},
                      {"partial", r.partial}});
    for (std::size_t k = 0; k < r.columns.size(); ++k) os << (k ? "," : "") << r.columns[k];
    os << '\n';
    for (const auto& row : r.rows) {
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (k) os << ',';
            const Json& v = row[k];
            if (v.is_null()) continue;
            if (v.is_string()) os << v.get<std::string>();
            else if (v.is_number_float()) {
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.10g", v.get<double>());
                os << buf;
            } else os << v.dump();
        }
        os << '\n';
    }
}

namespace {

using Clock = std::chrono::steady_clock;

struct Ctx {
    const ExperimentConfig& cfg;
    Json p;  // merged parameters
    ExperimentResult& res;
    Clock::time_point start = Clock::now();

    double num(const char* k) const { return p.at(k).get<double>(); }
    std::int64_t count(const char* k) const { return p.at(k).get<std::int64_t>(); }
    std::vector<double> list(const char* k) const { return p.at(k).get<std::vector<double>>(); }
    int threads() const { return std::max(1, cfg.threads); }
    std::uint64_t seed(std::uint64_t salt) const { return replica_seed(cfg.seed, 1000003ULL * salt + 17); }

    // Budget check between grid points.
    bool over() {
        if (cfg.budget_seconds <= 0) return false;
        if (std::chrono::duration<double>(Clock::now() - start).count() <= cfg.budget_seconds) return false;
        res.partial = true;
        return true;
    }
    void check(std::string name, bool ok, std::string detail) { res.assertions.push_back({std::move(name), ok, std::move(detail)}); }
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

HoleParams domain_one(const Ctx& c, double m) {
    HoleParams h;
    h.m = m;
    h.alpha = c.num("alpha");
    h.beta = c.num("beta");
    h.c1 = c.num("c1"), h.c2 = c.num("c2"), h.c3 = c.num("c3");
    h.validate();
    return h;
}

Json hole_defaults() {
    return {{"alpha", 55.0 / 48 + 0.02}, {"beta", 55.0 / 48 + 0.08}, {"c1", 1.0}, {"c2", 1.0}, {"c3", 1.0}};
}

Json merge(Json a, const Json& b) {
    for (auto it = b.begin(); it != b.end(); ++it) a[it.key()] = it.value();
    return a;
}

// Probability of an event of the configuration with holes applied; the field lives on `region`,
// the hole centers on region inflated by 4m.
using HoledEvent = std::function<bool(const SiteConfig& plain, const SiteConfig& holed, const HoleConfig& h)>;
EstimateResult holes_estimate(const Window& region, double p, const HoleParams& hp, std::int64_t n, std::uint64_t seed,
                              int threads, const HoledEvent& ev) {
    const auto d = Domain::make(region);
    return estimate_event(
        [&](Rng& rng) {
            const SiteConfig c = sample(d, p, rng);
            const HoleConfig h = sample_holes(region, hp, rng);
            return ev(c, apply_holes(c, h), h);
        },
        n, seed, threads);
}

struct Ratio {
    double r = 0, se = 0;
};
Ratio ratio(const EstimateResult& a, const EstimateResult& b) {
    if (b.p_hat <= 0) return {NAN, NAN};
    const double r = a.p_hat / b.p_hat;
    const double ra = a.p_hat > 0 ? a.std_err / a.p_hat : 0, rb = b.std_err / b.p_hat;
    return {r, r * std::sqrt(ra * ra + rb * rb)};
}

// Inverse of L_fit above 1/2, capped at 0.99 where the fit bottoms out.
double p_for_L(double L) { return std::min(0.99, 0.5 + std::pow(2.14 / L, 0.75)); }

// ---------------------------------------------------------------------------------------------

void arm_exponents(Ctx& c) {
    c.res.columns = {"n", "pi1", "pi1_se", "pi4", "pi4_se", "n_samples"};
    const double p = c.num("p"), n1 = c.num("n1");
    const auto ns = c.list("ns");
    const auto N = c.count("samples");
    std::vector<double> xs, p1, s1, p4, s4;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        if (c.over()) break;
        const auto a = estimate_arm(p, n1, ns[i], ArmSpec::parse("o"), N, c.seed(2 * i), c.threads());
        const auto b = estimate_arm(p, n1, ns[i], ArmSpec::parse("ovov"), N, c.seed(2 * i + 1), c.threads());
        xs.push_back(ns[i]), p1.push_back(a.p_hat), s1.push_back(a.std_err), p4.push_back(b.p_hat), s4.push_back(b.std_err);
        c.res.rows.push_back({ns[i], a.p_hat, a.std_err, b.p_hat, b.std_err, N});
    }
    if (xs.size() < 2) return;
    const auto f1 = loglog_binomial_fit(xs, p1, s1), f4 = loglog_binomial_fit(xs, p4, s4);
    c.res.stats = {{"slope_pi1", f1.slope}, {"slope_pi1_ci", {f1.slope_lo, f1.slope_hi}}, {"target_pi1", -5.0 / 48},
                   {"slope_pi4", f4.slope}, {"slope_pi4_ci", {f4.slope_lo, f4.slope_hi}}, {"target_pi4", -1.25}};
    c.check("pi1 slope in [-0.16, -0.06]", f1.slope >= -0.16 && f1.slope <= -0.06, fmt("slope %.4f", f1.slope));
    c.check("pi4 slope in [-1.45, -1.05]", f4.slope >= -1.45 && f4.slope <= -1.05, fmt("slope %.4f", f4.slope));
}

void kesten_relation(Ctx& c) {
    c.res.columns = {"p", "L_hat", "pi4", "pi4_se", "product", "product_se"};
    const auto ps = c.list("ps");
    LSearchOptions lo;
    lo.threads = c.threads();
    std::vector<double> prod;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        if (c.over()) break;
        const double L = static_cast<double>(estimate_L(ps[i], c.count("L_budget"), c.seed(2 * i), lo));
        const auto a = estimate_arm(0.5, 1, L, ArmSpec::parse("ovov"), c.count("arm_samples"), c.seed(2 * i + 1), c.threads());
        const double k = std::abs(ps[i] - 0.5) * L * L;
        prod.push_back(k * a.p_hat);
        c.res.rows.push_back({ps[i], L, a.p_hat, a.std_err, k * a.p_hat, k * a.std_err});
    }
    if (prod.size() < 2) return;
    const double mx = *std::max_element(prod.begin(), prod.end()), mn = *std::min_element(prod.begin(), prod.end());
    c.res.stats = {{"max_over_min", mx / mn}};
    c.check("max/min of |p - 1/2| L^2 pi4(L) <= 3", mx / mn <= 3, fmt("max/min %.3f", mx / mn));
}

void net_probability(Ctx& c) {
    c.res.columns = {"p", "n", "kappa", "L", "p_net", "std_err", "fail", "bound_fail"};
    const double p = c.num("p"), n = c.num("n");
    const double L = c.p.at("L").is_null() ? L_fit(p) : c.num("L");
    const auto ks = c.list("kappas");
    std::vector<double> x, y, w, fail;
    std::vector<EstimateResult> est;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        if (c.over()) break;
        double reach = n;
        for (const auto& r : net_rectangles(n, ks[i])) {
            double a, b, e, f;
            r.rect.bounds(a, b, e, f);
            reach = std::max({reach, std::abs(a), std::abs(b), std::abs(e), std::abs(f)});
        }
        const auto d = Domain::make(Window::ball(reach + 2));
        const double kappa = ks[i];
        const auto e = estimate_event([&](Rng& rng) { return detect_net(sample(d, p, rng), n, kappa); }, c.count("samples"),
                                      c.seed(i), c.threads());
        est.push_back(e);
        const double q = 1 - e.p_hat;
        fail.push_back(q);
        if (q > 0) {
            x.push_back(kappa / L);
            y.push_back(std::log(q / ((n / kappa) * (n / kappa))));
            w.push_back(q * q / std::max(e.std_err * e.std_err, 1e-300));
        }
    }
    double C1 = NAN, C2 = NAN;
    if (x.size() >= 2) {
        const auto f = weighted_line_fit(x, y, w);
        C2 = -f.slope;
        C1 = 0;
        for (std::size_t i = 0; i < x.size(); ++i) C1 = std::max(C1, std::exp(y[i] + C2 * x[i]));
    }
    bool holds = true;
    for (std::size_t i = 0; i < est.size(); ++i) {
        const double bf = std::isnan(C1) ? NAN : C1 * (n / ks[i]) * (n / ks[i]) * std::exp(-C2 * ks[i] / L);
        if (!std::isnan(bf) && fail[i] > bf * (1 + 1e-9)) holds = false;
        c.res.rows.push_back({p, n, ks[i], L, est[i].p_hat, est[i].std_err, fail[i], std::isnan(bf) ? Json() : Json(bf)});
    }
    c.res.stats = {{"C1", std::isnan(C1) ? Json() : Json(C1)}, {"C2", std::isnan(C2) ? Json() : Json(C2)}, {"L", L}};
    if (x.size() >= 2) {
        c.check("fitted decay rate C2 > 0", C2 > 0, fmt("C2 %.4f", C2));
        c.check("1 - P(net) below the fitted envelope on every grid point", holds, "");
    }
}

void hole_crossing(Ctx& c) {
    c.res.columns = {"m", "n1", "n2", "p_hat", "std_err", "bound_H", "n_samples"};
    int violations = 0, points = 0;
    std::uint64_t salt = 0;
    for (double m : c.list("ms"))
        for (double n1 : c.list("n1s")) {
            if (c.over()) goto done;
            const HoleParams hp = domain_one(c, m);
            const Window a = Window::annulus(n1, 2 * n1);
            const auto e = estimate_event([&](Rng& rng) { return detect_hole_crossing(sample_holes(a, hp, rng), a, HoleEvent::H); },
                                          c.count("samples"), c.seed(salt++), c.threads());
            const double b = analytic_hole_bounds(hp, n1, 2 * n1).bound_H;
            ++points;
            if (e.p_hat > b) ++violations;
            c.res.rows.push_back({m, n1, 2 * n1, e.p_hat, e.std_err, b, e.n_samples});
        }
done:
    c.res.stats = {{"violations", violations}, {"points", points}};
    c.check("empirical P(H) <= explicit bound on every grid point", violations == 0, fmt("%g violations", violations));
}

// Ratio of the holes event to the plain event on A_{n1, m}, over m.
struct RatioRow {
    double m;
    EstimateResult holed, plain;
    Ratio r;
};

void push_ratio_rows(Ctx& c, const std::vector<RatioRow>& rows) {
    for (const auto& r : rows)
        c.res.rows.push_back({r.m, r.holed.p_hat, r.holed.std_err, r.plain.p_hat, r.plain.std_err, r.r.r, r.r.se});
}

void four_arm_stability(Ctx& c) {
    c.res.columns = {"m", "p_W4", "p_W4_se", "pi4", "pi4_se", "ratio", "ratio_se", "inexact"};
    const double n1 = c.num("n1");
    std::vector<double> rs;
    std::uint64_t salt = 0;
    for (double m : c.list("ms")) {
        if (c.over()) break;
        const HoleParams hp = domain_one(c, m);
        const Window a = Window::annulus(n1, m);
        std::int64_t inexact = 0;
        const auto d = Domain::make(Window::ball(m));
        const auto w4 = estimate_event(
            [&](Rng& rng) {
                const SiteConfig cfg = sample(d, 0.5, rng);
                const HoleConfig h = sample_holes(Window::ball(m), hp, rng);
                const auto b = bracket_W4(cfg, h, a, static_cast<int>(c.count("max_holes")), c.count("node_budget"));
                if (!b.exact) ++inexact;
                return b.lower;
            },
            c.count("samples"), c.seed(salt++), 1);
        const auto pi4 = estimate_arm(0.5, n1, m, ArmSpec::parse("ovov"), c.count("pi4_samples"), c.seed(salt++), c.threads());
        const Ratio r = ratio(w4, pi4);
        rs.push_back(r.r);
        c.res.rows.push_back({m, w4.p_hat, w4.std_err, pi4.p_hat, pi4.std_err, r.r, r.se, inexact});
    }
    if (rs.size() < 2) return;
    const double mx = *std::max_element(rs.begin(), rs.end()), mn = *std::min_element(rs.begin(), rs.end());
    c.res.stats = {{"max_over_min", mx / mn}};
    c.check("ratio max/min <= 3 across m", mx / mn <= 3, fmt("max/min %.3f", mx / mn));
}

void arm_ratio_suite(Ctx& c, const char* sigma, std::uint64_t salt0, std::vector<RatioRow>& out) {
    c.res.columns = {"m", "p_holes", "p_holes_se", "p_plain", "p_plain_se", "ratio", "ratio_se"};
    const double n1 = c.num("n1");
    const ArmSpec spec = ArmSpec::parse(sigma);
    std::uint64_t salt = salt0;
    for (double m : c.list("ms")) {
        if (c.over()) break;
        const HoleParams hp = domain_one(c, m);
        const Window a = Window::annulus(n1, m);
        const auto holed = holes_estimate(Window::ball(m), 0.5, hp, c.count("samples"), c.seed(salt++), c.threads(),
                                          [&](const SiteConfig&, const SiteConfig& h, const HoleConfig&) {
                                              return detect_arm_event(h, a, spec);
                                          });
        const auto plain = estimate_arm(0.5, n1, m, spec, c.count("plain_samples"), c.seed(salt++), c.threads());
        out.push_back({m, holed, plain, ratio(holed, plain)});
    }
    push_ratio_rows(c, out);
}

void one_arm_stability(Ctx& c) {
    std::vector<RatioRow> rows;
    arm_ratio_suite(c, "o", 0, rows);
    if (rows.size() < 2) return;
    const auto& f = rows.front().r;
    const auto& l = rows.back().r;
    c.res.stats = {{"ratio_first", f.r}, {"ratio_last", l.r}};
    c.check("ratio moves toward 1 as m grows", std::abs(l.r - 1) <= std::abs(f.r - 1) + 3 * std::hypot(f.se, l.se),
            fmt("first %.4f last %.4f", f.r, l.r));
}

void vacant_arm_nonstability(Ctx& c) {
    std::vector<RatioRow> rows;
    arm_ratio_suite(c, "v", 0, rows);
    bool ok = rows.size() >= 2;
    Json growth = Json::array();
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double g = rows[i].r.r / rows[i - 1].r.r;
        growth.push_back(g);
        if (!(g >= 1.2)) ok = false;
    }
    c.res.stats = {{"growth_per_doubling", growth}};
    c.check("ratio grows by >= 20% per doubling of m", ok, growth.dump());
}

void crossing_stability(Ctx& c) {
    c.res.columns = {"m", "n", "p_holes", "p_holes_se", "p_plain", "p_plain_se", "difference", "difference_se"};
    const double p = c.num("p");
    std::vector<std::pair<double, double>> diffs;
    std::uint64_t salt = 0;
    for (double m : c.list("ms")) {
        if (c.over()) break;
        const double n = m * c.num("n_over_m");
        const HoleParams hp = domain_one(c, m);
        const Window r = Window::rectangle(0, 2 * n, 0, n);
        const auto both = [&](bool holes) {
            return holes_estimate(r, p, hp, c.count("samples"), c.seed(salt), c.threads(),
                                  [&](const SiteConfig& plain, const SiteConfig& h, const HoleConfig&) {
                                      return detect_crossing(holes ? h : plain, r, Orientation::horizontal, Color::occupied);
                                  });
        };
        const auto a = both(true), b = both(false);
        ++salt;
        const double se = joint_se(a.std_err, b.std_err);
        diffs.push_back({a.p_hat - b.p_hat, se});
        c.res.rows.push_back({m, n, a.p_hat, a.std_err, b.p_hat, b.std_err, a.p_hat - b.p_hat, se});
    }
    if (diffs.size() < 2) return;
    const auto f = diffs.front(), l = diffs.back();
    c.check("difference shrinks as m grows", std::abs(l.first) <= std::abs(f.first) + 3 * std::hypot(f.second, l.second),
            fmt("first %.4f last %.4f", f.first, l.first));
}

void stretched_exp_decay(Ctx& c) {
    c.res.columns = {"m", "p", "n", "n_over_m", "p_cross", "std_err", "one_minus"};
    const double m = c.num("m");
    const double p = c.p.at("p").is_null() ? p_for_L(m / 2) : c.num("p");
    const HoleParams hp = domain_one(c, m);
    std::vector<double> x, y, w;
    std::uint64_t salt = 0;
    for (double q : c.list("n_over_m")) {
        if (c.over()) break;
        const double n = std::max(1.0, std::round(q * m));
        const Window r = Window::rectangle(0, 2 * n, 0, n);
        const auto e = holes_estimate(r, p, hp, c.count("samples"), c.seed(salt++), c.threads(),
                                      [&](const SiteConfig&, const SiteConfig& h, const HoleConfig&) {
                                          return detect_crossing(h, r, Orientation::horizontal, Color::occupied);
                                      });
        const double one_minus = 1 - e.p_hat;
        c.res.rows.push_back({m, p, n, n / m, e.p_hat, e.std_err, one_minus});
        if (one_minus > 0) {
            x.push_back(n / m);
            y.push_back(std::log(one_minus));
            w.push_back(one_minus * one_minus / std::max(e.std_err * e.std_err, 1e-300));
        }
    }
    if (x.size() < 3) {
        c.res.stats = {{"fit", "too few points with failures"}};
        return;
    }
    double best = INFINITY, g_best = 0;
    LineFit fit_best;
    for (int k = 1; k <= 20; ++k) {
        const double g = 0.05 * k;
        std::vector<double> xg(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) xg[i] = std::pow(x[i], g);
        const auto f = weighted_line_fit(xg, y, w);
        double sse = 0;
        for (std::size_t i = 0; i < x.size(); ++i) sse += w[i] * std::pow(y[i] - f.intercept - f.slope * xg[i], 2);
        if (sse < best) best = sse, g_best = g, fit_best = f;
    }
    c.res.stats = {{"gamma", g_best}, {"lambda1", std::exp(fit_best.intercept)}, {"lambda2", -fit_best.slope}, {"p", p}};
    c.check("fitted lambda2 > 0", -fit_best.slope > 0, fmt("gamma %.2f lambda2 %.4f", g_best, -fit_best.slope));
}

void largest_cluster_concentration(Ctx& c) {
    c.res.columns = {"m", "p", "n", "theta", "theta_se", "ratio_mean", "ratio_sd", "runs"};
    std::vector<double> sds;
    std::uint64_t salt = 0;
    for (double m : c.list("ms")) {
        if (c.over()) break;
        const double p = p_for_L(m);
        const double n = std::ceil(c.num("n_factor") * m * std::pow(std::log(m), 2));
        const HoleParams hp = domain_one(c, m);
        const auto th = estimate_theta(p, static_cast<std::int64_t>(std::max(64.0, 2 * m)), c.count("theta_samples"),
                                       c.seed(salt++), c.threads());
        const Window w = Window::ball(n);
        const auto d = Domain::make(w);
        const double vol = static_cast<double>(d->size());
        Rng rng(c.seed(salt++));
        std::vector<double> ratios;
        for (std::int64_t r = 0; r < c.count("runs"); ++r) {
            const SiteConfig cfg = sample(d, p, rng);
            const HoleConfig h = sample_holes(w, hp, rng);
            const auto lc = largest_cluster(apply_holes(cfg, h), w);
            ratios.push_back(static_cast<double>(lc.second) / (vol * th.p_hat));
        }
        const auto ms = mean_se(ratios);
        const double sd = ms.se * std::sqrt(static_cast<double>(ms.n));
        sds.push_back(sd);
        c.res.rows.push_back({m, p, n, th.p_hat, th.std_err, ms.mean, sd, ms.n});
    }
    if (sds.size() < 2) return;
    c.check("spread of |C_max| / (|B_n| theta) shrinks with m", sds.back() <= sds.front(),
            fmt("sd first %.4f last %.4f", sds.front(), sds.back()));
}

void rho_pi_measurement(Ctx& c) {
    c.res.columns = {"r", "rho_hat", "envelope"};
    const double zeta = c.num("zeta");
    double eps = c.p.at("eps").is_null() ? 0 : c.num("eps");
    const double m_target = c.num("m");
    if (eps == 0) eps = kTc - t_of_p(1 - p_for_L(m_target));
    RhoPiOptions o;
    o.m = m_target;
    o.c1 = c.num("c1"), o.c2 = c.num("c2"), o.upsilon = c.num("upsilon");
    const Window w = Window::ball(c.num("radius_over_m") * m_target);
    const auto r = measure_rho_pi(zeta, eps, w, static_cast<int>(c.count("runs")), c.seed(0), o);
    std::vector<double> x, y, wt;
    for (std::size_t i = 0; i < r.r_grid.size(); ++i) {
        c.res.rows.push_back({r.r_grid[i], r.rho_hat[i], r.envelope[i]});
        const double ri = r.r_grid[i];
        if (ri >= c.num("fit_r_min") && ri <= m_target * c.num("fit_r_max_over_m") && r.rho_hat[i] > 0) {
            const double n = static_cast<double>(r.radii.size());
            x.push_back(std::log(ri));
            y.push_back(std::log(r.rho_hat[i]));
            wt.push_back(n * r.rho_hat[i] / std::max(1 - r.rho_hat[i], 1e-12));
        }
    }
    const double target = -(2 - 55.0 / 48);
    c.res.stats = {{"eps", eps},          {"T", r.T},          {"pi_hat", r.pi_hat}, {"pi_se", r.pi_se},
                   {"pi_expected", r.pi_expected}, {"ignited", r.ignited}, {"clipped", r.clipped}, {"target_slope", target}};
    c.check("pi_hat within 4 std errors of 1 - exp(-zeta T)", std::abs(r.pi_hat - r.pi_expected) <= 4 * r.pi_se,
            fmt("pi_hat %.6g expected %.6g", r.pi_hat, r.pi_expected));
    bool mono = true;
    for (std::size_t i = 1; i < r.rho_hat.size(); ++i) mono = mono && r.rho_hat[i] <= r.rho_hat[i - 1];
    c.check("rho_hat nonincreasing", mono, "");
    if (x.size() >= 2) {
        const auto f = weighted_line_fit(x, y, wt);
        c.res.stats["slope"] = f.slope;
        c.check("log-log slope of rho_hat within 0.3 of -41/48", std::abs(f.slope - target) <= 0.3, fmt("slope %.4f", f.slope));
    }
}

void exceptional_scale_burning(Ctx& c) {
    c.res.columns = {"zeta", "box_exponent", "side", "p_burn", "std_err", "runs"};
    const double t_lo = kTc + c.num("t_lo_offset"), t_hi = kTc + c.num("t_hi_offset");
    const auto zetas = c.list("zetas");
    const auto runs = static_cast<int>(c.count("runs"));
    std::vector<EstimateResult> small, mid;
    std::uint64_t salt = 0;
    for (double z : zetas) {
        if (c.over()) break;
        for (const double ex : {c.num("exponent_m1"), c.num("exponent_mid")}) {
            const double side = std::ceil(std::pow(z, -ex));
            const auto e = estimate_burning_prob(z, BurnFamily::box(side), t_lo, t_hi, runs, c.seed(salt++), c.threads());
            (ex == c.num("exponent_m1") ? small : mid).push_back(e.box);
            c.res.rows.push_back({z, ex, side, e.box.p_hat, e.box.std_err, runs});
        }
    }
    if (small.size() < zetas.size() || mid.size() < zetas.size()) return;
    bool floor_ok = true, dec = true;
    for (std::size_t i = 0; i < small.size(); ++i) floor_ok = floor_ok && small[i].p_hat >= 0.02;
    for (std::size_t i = 1; i < mid.size(); ++i) dec = dec && mid[i].p_hat < mid[i - 1].p_hat;
    c.check("burning probability in boxes of side zeta^-1/2 stays >= 0.02", floor_ok, "");
    c.check("burning probability in boxes of side zeta^-0.58 decreases as zeta falls", dec, "");
}

void frozen_boundary_alternative(Ctx& c) {
    c.res.columns = {"variant", "N", "p_burn", "std_err", "vacant_fraction", "max_cluster", "cap_ok"};
    const double zeta = c.num("zeta"), n = c.num("n");
    const auto runs = c.count("runs");
    const double t_lo = kTc + c.num("t_lo_offset"), t_hi = kTc + c.num("t_hi_offset");
    std::uint64_t salt = 0;
    for (const bool boundary : {false, true}) {
        if (c.over()) break;
        FireOptions o;
        o.region = Window::ball(n / 2);
        o.zeta = zeta;
        o.t_end = t_hi;
        o.burn_boundary = boundary;
        const index_t origin = Domain(o.region).index_of({0, 0});
        std::vector<double> vac;
        std::int64_t hits = 0;
        for (std::int64_t r = 0; r < runs; ++r) {
            const auto tl = simulate_ffwor(o, replica_seed(c.seed(salt), static_cast<std::uint64_t>(r)));
            const double b = tl.final.burn_time[static_cast<std::size_t>(origin)];
            hits += b >= t_lo && b <= t_hi;
            vac.push_back(static_cast<double>(tl.final.count(0)) / static_cast<double>(tl.final.size()));
        }
        ++salt;
        const auto e = EstimateResult::from_counts(hits, runs, c.seed(salt));
        c.res.rows.push_back({boundary ? "ffwor-boundary" : "ffwor", Json(), e.p_hat, e.std_err, mean_se(vac).mean, Json(), Json()});
    }
    bool all_ok = true;
    for (double N : c.list("Ns")) {
        if (c.over()) break;
        const auto Ni = static_cast<std::int64_t>(N);
        std::int64_t biggest = 0;
        bool ok = true;
        std::vector<double> vac;
        for (std::int64_t r = 0; r < runs; ++r) {
            const auto f = simulate_frozen(Window::ball(c.num("frozen_n") / 2), Ni, replica_seed(c.seed(salt), static_cast<std::uint64_t>(r)));
            const auto lab = label_clusters(f.config, Color::occupied);
            for (auto s : lab.size) biggest = std::max(biggest, s), ok = ok && s <= 6 * (Ni - 1) + 1;
            for (const auto& fc : f.frozen) ok = ok && fc.size >= Ni;
            vac.push_back(static_cast<double>(f.config.count(0)) / static_cast<double>(f.config.size()));
        }
        ++salt;
        all_ok = all_ok && ok;
        c.res.rows.push_back({"frozen", Ni, Json(), Json(), mean_se(vac).mean, biggest, ok});
    }
    c.check("frozen clusters within 6(N-1)+1 and every frozen cluster >= N", all_ok, "");
}

struct Suite {
    Json defaults;
    std::function<void(Ctx&)> run;
};

const std::map<std::string, Suite>& registry() {
    static const std::map<std::string, Suite> r = [] {
        std::map<std::string, Suite> m;
        const Json holes = hole_defaults();
        m["arm-exponents"] = {{{"p", 0.5}, {"n1", 1.0}, {"ns", {8, 16, 32, 64, 128, 256}}, {"samples", 50000}}, arm_exponents};
        m["kesten-relation"] = {{{"ps", {0.52, 0.54, 0.56, 0.58, 0.60}}, {"L_budget", 200000}, {"arm_samples", 50000}},
                                kesten_relation};
        m["net-probability"] = {{{"p", 0.7}, {"n", 48.0}, {"kappas", {4, 6, 8, 12, 16}}, {"samples", 2000}, {"L", nullptr}},
                                net_probability};
        m["hole-crossing"] = {merge(holes, {{"ms", {16, 32, 64}}, {"n1s", {4, 8, 16}}, {"samples", 10000}}), hole_crossing};
        m["four-arm-stability"] = {merge(holes, {{"ms", {16, 32, 64}},
                                                {"n1", 2.0},
                                                {"samples", 400},
                                                {"pi4_samples", 20000},
                                                {"max_holes", 20},
                                                {"node_budget", 0}}),
                                   four_arm_stability};
        m["one-arm-stability"] = {merge(holes, {{"ms", {16, 32, 64, 128}}, {"n1", 1.0}, {"samples", 4000}, {"plain_samples", 20000}}),
                                  one_arm_stability};
        m["crossing-stability"] = {merge(holes, {{"ms", {16, 32, 64}}, {"p", 0.5}, {"n_over_m", 1.0}, {"samples", 4000}}),
                                   crossing_stability};
        m["stretched-exp-decay"] = {merge(holes, {{"m", 16.0}, {"p", nullptr}, {"n_over_m", {0.25, 0.5, 1, 2, 4}}, {"samples", 2000}}),
                                    stretched_exp_decay};
        m["largest-cluster-concentration"] = {
            merge(holes, {{"ms", {8, 16, 32}}, {"n_factor", 1.0}, {"runs", 100}, {"theta_samples", 4000}}),
            largest_cluster_concentration};
        Json vac = merge(holes, {{"ms", {16, 32, 64}}, {"n1", 2.0}, {"samples", 4000}, {"plain_samples", 20000}});
        vac["alpha"] = 1.2, vac["beta"] = 1.25;
        m["vacant-arm-nonstability"] = {vac, vacant_arm_nonstability};
        m["rho-pi-measurement"] = {{{"zeta", 1e-3},
                                    {"m", 48.0},
                                    {"eps", nullptr},
                                    {"radius_over_m", 2.0},
                                    {"runs", 100},
                                    {"c1", 1.0},
                                    {"c2", 1.0},
                                    {"upsilon", 0.01},
                                    {"fit_r_min", 2.0},
                                    {"fit_r_max_over_m", 0.34}},
                                   rho_pi_measurement};
        m["exceptional-scale-burning"] = {{{"zetas", {4e-3, 1e-3, 2.5e-4}},
                                           {"runs", 500},
                                           {"exponent_m1", 0.5},
                                           {"exponent_mid", 0.58},
                                           {"t_lo_offset", 0.1},
                                           {"t_hi_offset", 0.6}},
                                          exceptional_scale_burning};
        m["frozen-boundary-alternative"] = {{{"zeta", 0.01},
                                             {"n", 64.0},
                                             {"runs", 100},
                                             {"t_lo_offset", 0.1},
                                             {"t_hi_offset", 0.6},
                                             {"Ns", {10, 50, 100}},
                                             {"frozen_n", 128.0}},
                                            frozen_boundary_alternative};
        return m;
    }();
    return r;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [k, s] : registry()) v.push_back(k);
        return v;
    }();
    return names;
}

Json experiment_defaults(const std::string& name) {
    const auto it = registry().find(name);
    if (it == registry().end()) throw InvalidArgument("unknown experiment '" + name + "'");
    return it->second.defaults;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    const auto it = registry().find(cfg.name);
    if (it == registry().end()) throw InvalidArgument("unknown experiment '" + cfg.name + "'");
    if (!cfg.params.is_object()) throw InvalidArgument("experiment params must be an object");
    Json p = it->second.defaults;
    for (auto kv = cfg.params.begin(); kv != cfg.params.end(); ++kv) {
        if (!p.contains(kv.key())) throw InvalidArgument("unknown parameter '" + kv.key() + "' for " + cfg.name);
        p[kv.key()] = kv.value();
    }
    ExperimentResult res;
    res.name = cfg.name;
    res.seed = cfg.seed;
    res.params = p;
    res.config_hash = content_hash({{"name", cfg.name}, {"params", p}, {"seed", cfg.seed}});
    Ctx ctx{cfg, p, res};
    try {
        it->second.run(ctx);
    } catch (const Json::exception& e) {
        throw InvalidArgument(std::string("bad parameter value: ") + e.what());
    }
    res.elapsed = std::chrono::duration<double>(Clock::now() - ctx.start).count();

    if (!cfg.out.empty()) {
        std::filesystem::create_directories(cfg.out);
        const auto base = std::filesystem::path(cfg.out) / cfg.name;
        const std::string csv = base.string() + ".csv", js = base.string() + ".summary.json";
        std::ofstream a(csv), b(js);
        if (!a || !b) throw std::runtime_error("cannot write experiment output under '" + cfg.out + "'");
        write_experiment_csv(a, res);
        b << res.summary().dump(2) << '\n';
        res.files = {csv, js};
    }
    return res;
}

}  // namespace nearcrit
