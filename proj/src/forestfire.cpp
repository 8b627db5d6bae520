#include "nearcrit/forestfire.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <queue>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "nearcrit/errors.hpp"
#include "nearcrit/io.hpp"
#include "nearcrit/scales.hpp"
#include "nearcrit/union_find.hpp"

namespace nearcrit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t pack(SiteCoord v) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(v.x)) << 32) | static_cast<std::uint32_t>(v.y);
}

double exp1(std::uint64_t h) { return -std::log(u64_to_unit(h)); }

std::uint64_t point_hash(std::uint64_t seed, SiteCoord v) {
    return hash_combine(hash_combine(seed, static_cast<std::uint32_t>(v.x)), static_cast<std::uint32_t>(v.y));
}

double window_radius(const Window& w) {
    double xlo, xhi, ylo, yhi;
    w.bounds(xlo, xhi, ylo, yhi);
    return 0.5 * std::max(xhi - xlo, yhi - ylo);
}

}  // namespace

std::uint64_t site_stream(std::uint64_t seed, Stream tag, SiteCoord v, std::uint64_t counter) {
    std::uint64_t h = hash_combine(seed, static_cast<std::uint64_t>(tag));
    h = hash_combine(h, static_cast<std::uint32_t>(v.x));
    h = hash_combine(h, static_cast<std::uint32_t>(v.y));
    return hash_combine(h, counter);
}

double birth_time(std::uint64_t seed, SiteCoord v) { return exp1(site_stream(seed, Stream::birth, v)); }

namespace {

// j-th ignition mark of v, built from the (j-1)-th.
double next_mark(std::uint64_t seed, SiteCoord v, double zeta, double prev, std::uint64_t j) {
    return prev + exp1(site_stream(seed, Stream::ignition, v, j)) / zeta;
}

}  // namespace

std::vector<double> ignition_marks(std::uint64_t seed, SiteCoord v, double zeta, double t_end) {
    std::vector<double> out;
    if (!(zeta > 0)) return out;
    if (std::isinf(t_end)) throw InvalidArgument("ignition_marks needs a finite horizon");
    double t = 0;
    for (std::uint64_t j = 0;; ++j) {
        t = next_mark(seed, v, zeta, t, j);
        if (t > t_end) break;
        out.push_back(t);
    }
    return out;
}

SiteConfig simulate_pure_birth(const Window& w, double t, std::uint64_t seed) {
    if (!(t >= 0)) throw InvalidArgument("t must be >= 0");
    SiteConfig c(Domain::make(w), 0);
    c.birth_time.assign(c.size(), kNaN);
    const auto& sites = c.domain->sites();
    for (std::size_t i = 0; i < sites.size(); ++i) {
        const double b = birth_time(seed, sites[i]);
        if (b <= t) c.state[i] = 1, c.birth_time[i] = b;
    }
    return c;
}

// ---------------------------------------------------------------------------------------------

SiteConfig FireTimeline::state_at(double t) const {
    SiteConfig c(final.domain, 0);
    const std::size_t n = c.size();
    std::vector<std::vector<std::pair<double, std::int8_t>>> ev(n);
    for (std::size_t i = 0; i < n; ++i)
        if (!std::isnan(final.birth_time[i])) ev[i].push_back({final.birth_time[i], 1});
    for (const auto& b : rebirths) ev[static_cast<std::size_t>(b.site)].push_back({b.time, 1});
    const std::int8_t burnt = opts.recovery ? 0 : -1;
    for (const auto& b : burns)
        for (const index_t s : b.sites) ev[static_cast<std::size_t>(s)].push_back({b.time, burnt});
    for (std::size_t i = 0; i < n; ++i) {
        std::sort(ev[i].begin(), ev[i].end());
        for (const auto& [time, s] : ev[i]) {
            if (time > t) break;
            c.state[i] = s;
        }
    }
    return c;
}

FireTimeline simulate_ffwor(const FireOptions& opts, std::uint64_t seed) {
    if (!(opts.zeta >= 0)) throw InvalidArgument("zeta must be >= 0");
    if (std::isnan(opts.t_end) || opts.t_end < 0) throw InvalidArgument("t_end must be >= 0");
    if (opts.stop_ignitions_at && !(*opts.stop_ignitions_at >= 0 && *opts.stop_ignitions_at <= opts.t_end))
        throw InvalidArgument("stop_ignitions_at must lie in [0, t_end]");
    if (opts.recovery && std::isinf(opts.t_end)) throw InvalidArgument("recovery needs a finite t_end");

    FireTimeline tl;
    tl.opts = opts;
    tl.seed = seed;
    auto dom = Domain::make(opts.region);
    const auto& d = *dom;
    const std::size_t n = d.size();
    tl.final = SiteConfig(dom, 0);
    tl.final.birth_time.assign(n, kNaN);
    tl.final.burn_time.assign(n, kNaN);
    tl.birth_time.resize(n);
    tl.ignitions.assign(n, {});
    tl.scar_time.assign(n, kInf);
    auto& state = tl.final.state;

    const double s_stop = opts.stop_ignitions_at.value_or(kInf);
    const double horizon = opts.t_end;
    const bool endless = std::isinf(horizon);

    // (time, kind, site): kind 0 birth, 1 ignition
    using Event = std::tuple<double, int, index_t>;
    std::priority_queue<Event, std::vector<Event>, std::greater<>> q;
    std::vector<std::uint64_t> mark_count(n, 0), rebirth_count(n, 0);
    std::vector<double> last_mark(n, 0.0);

    for (std::size_t i = 0; i < n; ++i) {
        const index_t ii = static_cast<index_t>(i);
        tl.birth_time[i] = birth_time(seed, d.site(ii));
        if (tl.birth_time[i] <= horizon) q.push({tl.birth_time[i], 0, ii});
        if (opts.zeta > 0) {
            const double m = next_mark(seed, d.site(ii), opts.zeta, 0.0, 0);
            mark_count[i] = 1, last_mark[i] = m;
            if (m <= horizon && m <= s_stop) q.push({m, 1, ii});
        }
    }

    std::int64_t alive = static_cast<std::int64_t>(n);  // sites that can still change (endless runs)
    std::vector<std::uint8_t> seen(n, 0);
    std::vector<index_t> stack, cluster;

    auto dead = [&](std::size_t i) { return !opts.recovery && (state[i] == -1 || std::isfinite(tl.scar_time[i])); };

    while (!q.empty() && !(endless && alive == 0)) {
        const auto [time, kind, v] = q.top();
        q.pop();
        const std::size_t vi = static_cast<std::size_t>(v);
        tl.end_time = time;
        if (kind == 0) {
            if (state[vi] == 0 && time < tl.scar_time[vi]) {
                state[vi] = 1;
                if (std::isnan(tl.final.birth_time[vi])) tl.final.birth_time[vi] = time;
                else tl.rebirths.push_back({time, v});
            }
            continue;
        }

        tl.ignitions[vi].push_back(time);
        const bool was_dead = dead(vi);
        if (state[vi] == 1) {
            if (opts.record_snapshots) tl.snapshots.push_back(state);
            cluster.clear();
            stack.assign(1, v);
            seen[vi] = 1;
            while (!stack.empty()) {
                const index_t u = stack.back();
                stack.pop_back();
                cluster.push_back(u);
                for (int k = 0; k < 6; ++k) {
                    const index_t w = d.neighbor(u, k);
                    if (w == kNone || seen[static_cast<std::size_t>(w)] || state[static_cast<std::size_t>(w)] != 1) continue;
                    seen[static_cast<std::size_t>(w)] = 1;
                    stack.push_back(w);
                }
            }
            std::sort(cluster.begin(), cluster.end());
            for (const index_t u : cluster) {
                const std::size_t ui = static_cast<std::size_t>(u);
                seen[ui] = 0;
                state[ui] = opts.recovery ? 0 : -1;
                tl.final.burn_time[ui] = time;
                if (!opts.recovery) --alive;
                if (opts.recovery) {
                    const double b =
                        time + exp1(site_stream(seed, Stream::rebirth, d.site(u), rebirth_count[ui]++));
                    if (b <= horizon) q.push({b, 0, u});
                }
            }
            if (opts.burn_boundary) {
                for (const index_t u : cluster)
                    for (int k = 0; k < 6; ++k) {
                        const index_t w = d.neighbor(u, k);
                        if (w == kNone) continue;
                        const std::size_t wi = static_cast<std::size_t>(w);
                        if (state[wi] != 0 || std::isfinite(tl.scar_time[wi])) continue;
                        tl.scar_time[wi] = time;
                        if (!opts.recovery) --alive;
                    }
            }
            tl.burns.push_back({time, v, cluster});
        }
        if (endless && was_dead) continue;
        const double m = next_mark(seed, d.site(v), opts.zeta, last_mark[vi], mark_count[vi]++);
        last_mark[vi] = m;
        if (m <= horizon && m <= s_stop) q.push({m, 1, v});
    }
    if (!endless) tl.end_time = horizon;
    return tl;
}

void write_burn_csv(std::ostream& os, const FireTimeline& tl) {
    os << "time,ignited_x,ignited_y,cluster_size\n";
    char buf[32];
    for (const auto& b : tl.burns) {
        const SiteCoord v = tl.final.domain->site(b.ignited);
        std::snprintf(buf, sizeof buf, "%.17g", b.time);
        os << buf << ',' << v.x << ',' << v.y << ',' << b.sites.size() << '\n';
    }
}

std::string timeline_json(const FireTimeline& tl) {
    const auto& d = *tl.final.domain;
    Json opts{{"region", window_to_json(tl.opts.region)},
              {"zeta", tl.opts.zeta},
              {"t_end", std::isinf(tl.opts.t_end) ? Json("inf") : Json(tl.opts.t_end)},
              {"burn_boundary", tl.opts.burn_boundary},
              {"recovery", tl.opts.recovery}};
    opts["stop_ignitions_at"] = tl.opts.stop_ignitions_at ? Json(*tl.opts.stop_ignitions_at) : Json(nullptr);
    Json burns = Json::array();
    for (const auto& b : tl.burns) {
        Json sites = Json::array();
        for (const index_t s : b.sites) sites.push_back({d.site(s).x, d.site(s).y});
        burns.push_back({{"time", b.time}, {"ignited", {d.site(b.ignited).x, d.site(b.ignited).y}}, {"sites", sites}});
    }
    Json rebirths = Json::array();
    for (const auto& b : tl.rebirths) rebirths.push_back({{"time", b.time}, {"site", {d.site(b.site).x, d.site(b.site).y}}});
    Json j{{"seed", tl.seed}, {"options", opts}, {"end_time", tl.end_time}, {"burns", burns},
           {"rebirths", rebirths}, {"final", config_to_json(tl.final)}};
    return j.dump();
}

FireTimeline timeline_from_json(const std::string& s) {
    FireTimeline tl;
    try {
        const Json j = Json::parse(s);
        const Json& o = j.at("options");
        tl.opts.region = window_from_json(o.at("region"));
        tl.opts.zeta = o.at("zeta").get<double>();
        tl.opts.t_end = o.at("t_end").is_string() ? kInf : o.at("t_end").get<double>();
        if (!o.at("stop_ignitions_at").is_null()) tl.opts.stop_ignitions_at = o["stop_ignitions_at"].get<double>();
        tl.opts.burn_boundary = o.at("burn_boundary").get<bool>();
        tl.opts.recovery = o.at("recovery").get<bool>();
        tl.seed = j.at("seed").get<std::uint64_t>();
        tl.end_time = j.at("end_time").get<double>();
        tl.final = config_from_json(j.at("final"));
        const auto& d = *tl.final.domain;
        auto idx = [&](const Json& xy) {
            const index_t i = d.index_of({xy.at(0).get<std::int32_t>(), xy.at(1).get<std::int32_t>()});
            if (i == kNone) throw InvalidArgument("timeline site outside the region");
            return i;
        };
        for (const auto& b : j.at("burns")) {
            BurnEvent e{b.at("time").get<double>(), idx(b.at("ignited")), {}};
            for (const auto& x : b.at("sites")) e.sites.push_back(idx(x));
            tl.burns.push_back(std::move(e));
        }
        for (const auto& b : j.at("rebirths")) tl.rebirths.push_back({b.at("time").get<double>(), idx(b.at("site"))});
        tl.birth_time.resize(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) tl.birth_time[i] = birth_time(tl.seed, d.site(static_cast<index_t>(i)));
        tl.ignitions.assign(d.size(), {});
        tl.scar_time.assign(d.size(), kInf);
    } catch (const Json::exception& e) {
        throw InvalidArgument(std::string("bad timeline JSON: ") + e.what());
    }
    return tl;
}

double L_fit(double p) {
    const double d = std::abs(p - 0.5);
    if (d == 0) return kInf;
    return 2.14 * std::pow(d, -4.0 / 3.0);
}

// ---------------------------------------------------------------------------------------------

YResult simulate_Y(const Window& w, double zeta, double t, std::uint64_t seed, const YOptions& opt) {
    if (!(t >= 0)) throw InvalidArgument("t must be >= 0");
    if (!(zeta >= 0)) throw InvalidArgument("zeta must be >= 0");
    YResult res;
    res.config = simulate_pure_birth(w, t, seed);
    auto& c = res.config;
    const auto& d = *c.domain;
    const double max_pad = opt.max_pad.value_or(2.0 * window_radius(w));

    std::unordered_set<std::uint64_t> seen;
    std::vector<SiteCoord> stack, boundary;
    for (const SiteCoord v : d.sites()) {
        const auto marks = ignition_marks(seed, v, zeta, t);
        for (std::size_t j = 0; j < marks.size(); ++j) {
            if (!(marks[j] < t)) continue;
            ++res.marks;
            const double p = p_of_t(marks[j]);
            const std::uint64_t thr = bernoulli_threshold(p);
            const std::uint64_t field = site_stream(seed, Stream::y_cluster, v, j);
            auto occ = [&](SiteCoord u) { return p >= 1.0 || point_hash(field, u) < thr; };
            if (!occ(v)) continue;
            const double pad = opt.pad.value_or(std::min(2.0 * L_fit(p), max_pad));
            const Window region = w.inflated(pad);
            seen.clear(), boundary.clear();
            stack.assign(1, v);
            seen.insert(pack(v));
            bool clipped = false;
            while (!stack.empty()) {
                const SiteCoord u = stack.back();
                stack.pop_back();
                if (d.contains(u)) c.set(u, 0);
                for (const SiteCoord x : neighbors(u)) {
                    if (!region.contains(x)) {
                        clipped = true;
                        continue;
                    }
                    if (!seen.insert(pack(x)).second) continue;
                    if (occ(x)) stack.push_back(x);
                    else boundary.push_back(x);
                }
            }
            for (const SiteCoord x : boundary)
                if (d.contains(x)) c.set(x, 0);
            if (clipped) ++res.clipped;
        }
    }
    for (std::size_t i = 0; i < c.size(); ++i)
        if (c.state[i] == 0) c.birth_time[i] = kNaN;
    return res;
}

// ---------------------------------------------------------------------------------------------

FrozenResult simulate_frozen(const Window& w, std::int64_t N, std::uint64_t seed) {
    if (N < 1) throw InvalidArgument("N must be >= 1");
    FrozenResult res;
    res.config = SiteConfig(Domain::make(w), 0);
    auto& c = res.config;
    const auto& d = *c.domain;
    const std::size_t n = d.size();
    c.birth_time.resize(n);
    std::vector<index_t> order(n);
    for (std::size_t i = 0; i < n; ++i) {
        c.birth_time[i] = u64_to_unit(site_stream(seed, Stream::frozen, d.site(static_cast<index_t>(i))));
        order[i] = static_cast<index_t>(i);
    }
    std::sort(order.begin(), order.end(), [&](index_t a, index_t b) {
        return c.birth_time[static_cast<std::size_t>(a)] < c.birth_time[static_cast<std::size_t>(b)];
    });

    UnionFind uf(n);
    std::vector<std::int32_t> roots;
    for (const index_t v : order) {
        const std::size_t vi = static_cast<std::size_t>(v);
        roots.clear();
        bool blocked = false;
        for (int k = 0; k < 6; ++k) {
            const index_t u = d.neighbor(v, k);
            if (u == kNone || c.state[static_cast<std::size_t>(u)] != 1) continue;
            const std::int32_t r = uf.find(u);
            if (std::find(roots.begin(), roots.end(), r) != roots.end()) continue;
            if (uf.size_of(r) >= N) blocked = true;
            roots.push_back(r);
        }
        if (blocked) {
            ++res.blocked;
            continue;
        }
        c.state[vi] = 1;
        MergeRecord rec{v, c.birth_time[vi], {}, 1};
        std::int32_t root = v;
        for (const std::int32_t r : roots) {
            rec.parts.push_back(uf.size_of(r));
            root = uf.unite(root, r);
        }
        rec.size = uf.size_of(root);
        if (!roots.empty() || rec.size >= N) res.merges.push_back(rec);
        if (rec.size >= N) res.frozen.push_back({uf.find(root), rec.size, rec.time});
    }
    for (std::size_t i = 0; i < n; ++i)
        if (c.state[i] == 0) c.birth_time[i] = kNaN;
    return res;
}

// ---------------------------------------------------------------------------------------------

RhoPi measure_rho_pi(double zeta, double eps, const Window& w, int n_runs, std::uint64_t seed,
                     const RhoPiOptions& opt) {
    if (!(eps > 0)) throw InvalidArgument("eps must be > 0");
    if (!(eps < kTc)) throw InvalidArgument("eps must be < t_c");
    if (!(zeta >= 0)) throw InvalidArgument("zeta must be >= 0");
    if (n_runs < 1) throw InvalidArgument("n_runs must be >= 1");
    RhoPi out;
    out.T = kTc - eps;
    out.m = opt.m.value_or(L_fit(p_of_t(out.T)));
    const auto dom = Domain::make(w);
    const auto& d = *dom;
    out.sites = static_cast<std::int64_t>(d.size()) * n_runs;

    std::vector<double> born(d.size());
    std::unordered_set<std::uint64_t> seen;
    std::vector<index_t> stack;
    for (int r = 0; r < n_runs; ++r) {
        const std::uint64_t s = replica_seed(seed, static_cast<std::uint64_t>(r));
        for (std::size_t i = 0; i < d.size(); ++i) born[i] = birth_time(s, d.site(static_cast<index_t>(i)));
        for (std::size_t i = 0; i < d.size(); ++i) {
            const SiteCoord v = d.site(static_cast<index_t>(i));
            const auto marks = ignition_marks(s, v, zeta, out.T);
            if (marks.empty()) continue;
            ++out.ignited;
            const Point z = embed(v);
            double best = 0;
            bool clipped = false;
            for (const double tau : marks) {
                if (!(born[i] <= tau)) continue;
                seen.clear();
                stack.assign(1, static_cast<index_t>(i));
                seen.insert(i);
                while (!stack.empty()) {
                    const index_t u = stack.back();
                    stack.pop_back();
                    best = std::max(best, linf(d.site(u), z));
                    for (const SiteCoord x : neighbors(d.site(u))) {
                        const index_t xi = d.index_of(x);
                        if (xi == kNone) {
                            clipped = true;
                            best = std::max(best, linf(x, z));
                            continue;
                        }
                        if (!seen.insert(static_cast<std::uint64_t>(xi)).second) continue;
                        if (born[static_cast<std::size_t>(xi)] <= tau) stack.push_back(xi);
                        else best = std::max(best, linf(x, z));
                    }
                }
            }
            if (clipped) ++out.clipped;
            out.radii.push_back(best);
        }
    }

    const double N = static_cast<double>(out.sites);
    out.pi_hat = static_cast<double>(out.ignited) / N;
    out.pi_se = std::sqrt(std::max(out.pi_hat * (1 - out.pi_hat), 1e-300) / N);
    out.pi_expected = 1 - std::exp(-zeta * out.T);

    out.r_grid = opt.r_grid;
    if (out.r_grid.empty()) {
        const double rmax = out.radii.empty() ? 1.0 : *std::max_element(out.radii.begin(), out.radii.end());
        for (double r = 1; r <= std::max(1.0, rmax); r *= 2) out.r_grid.push_back(r);
    }
    std::vector<double> sorted = out.radii;
    std::sort(sorted.begin(), sorted.end());
    const double exponent = 55.0 / 48.0 + opt.upsilon - 2.0;
    for (const double r : out.r_grid) {
        const auto ge = sorted.end() - std::lower_bound(sorted.begin(), sorted.end(), r - kGeomEps);
        out.rho_hat.push_back(sorted.empty() ? 0.0 : static_cast<double>(ge) / static_cast<double>(sorted.size()));
        out.envelope.push_back(opt.c1 * std::pow(r, exponent) * std::exp(-opt.c2 * r / out.m));
    }
    return out;
}

// ---------------------------------------------------------------------------------------------

namespace {

EstimateResult burn_in_ball(double zeta, double radius, double t_lo, double t_hi, int n_runs, std::uint64_t seed,
                            int threads) {
    FireOptions o;
    o.region = Window::ball(radius);
    o.zeta = zeta;
    o.t_end = t_hi;
    const index_t origin = Domain(o.region).index_of({0, 0});
    if (origin == kNone) throw InvalidArgument("the box does not contain the origin");
    return estimate_event(
        [&](Rng& rng) {
            if (zeta == 0) return false;
            const FireTimeline tl = simulate_ffwor(o, rng());
            const double b = tl.final.burn_time[static_cast<std::size_t>(origin)];
            return b >= t_lo && b <= t_hi;
        },
        n_runs, seed, threads);
}

}  // namespace

BurnEstimate estimate_burning_prob(double zeta, const BurnFamily& fam, double t_lo, double t_hi, int n_runs,
                                   std::uint64_t seed, int threads) {
    if (!(kTc < t_lo && t_lo < t_hi)) throw InvalidArgument("need t_c < t_lo < t_hi");
    if (!(zeta >= 0)) throw InvalidArgument("zeta must be >= 0");
    if (n_runs < 1) throw InvalidArgument("n_runs must be >= 1");
    BurnEstimate out;
    if (fam.kind == BurnFamily::Kind::box) {
        if (!(fam.n >= 1)) throw InvalidArgument("box side must be >= 1");
        out.box = burn_in_ball(zeta, fam.n / 2, t_lo, t_hi, n_runs, seed, threads);
        out.min = out.max = out.box;
        return out;
    }
    if (!(fam.n1 > 0 && fam.n1 <= fam.n2) || fam.grid < 1) throw InvalidArgument("bad circuit family");
    out.proxy = true;
    for (int i = 0; i < fam.grid; ++i) {
        const double r = fam.grid == 1 ? fam.n1 : fam.n1 * std::pow(fam.n2 / fam.n1, double(i) / (fam.grid - 1));
        const auto e = burn_in_ball(zeta, r, t_lo, t_hi, n_runs, seed, threads);
        out.per_radius.push_back({r, e});
        if (i == 0 || e.p_hat < out.min.p_hat) out.min = e;
        if (i == 0 || e.p_hat > out.max.p_hat) out.max = e;
    }
    out.box = out.max;
    return out;
}

}  // namespace nearcrit
