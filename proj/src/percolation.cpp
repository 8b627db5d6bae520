#include "nearcrit/percolation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "explore.hpp"
#include "nearcrit/annulus.hpp"
#include "nearcrit/errors.hpp"
#include "nearcrit/stats.hpp"
#include "nearcrit/union_find.hpp"

namespace nearcrit {

namespace detail {

Grid make_grid(const Domain& d, const std::function<bool(index_t)>& is_source,
               const std::function<bool(index_t)>& is_target) {
    Grid g;
    if (d.size() == 0) {
        g.stride = 1, g.rows = 1;
        g.flag.assign(1, 0);
        return g;
    }
    std::int32_t xmin = d.sites()[0].x, xmax = xmin;
    for (auto v : d.sites()) xmin = std::min(xmin, v.x), xmax = std::max(xmax, v.x);
    g.xmin = xmin - 1;
    g.ymin = d.sites().front().y - 1;
    g.stride = xmax - xmin + 3;
    g.rows = d.sites().back().y - d.sites().front().y + 3;
    g.flag.assign(static_cast<std::size_t>(g.stride) * static_cast<std::size_t>(g.rows), 0);
    for (std::size_t i = 0; i < d.size(); ++i) {
        const std::int32_t c = g.cell(d.sites()[i]);
        std::uint8_t f = kIn;
        if (is_source(static_cast<index_t>(i))) {
            f |= kSource;
            g.sources.push_back(c);
        }
        if (is_target(static_cast<index_t>(i))) f |= kTarget;
        g.flag[c] = f;
    }
    g.delta = {1, g.stride, g.stride - 1, -1, -g.stride, -g.stride + 1};
    return g;
}

}  // namespace detail

using detail::Grid;

SiteConfig::SiteConfig(DomainPtr d, std::int8_t fill) : domain(std::move(d)), state(domain->size(), fill) {}

std::int8_t SiteConfig::at(SiteCoord v) const {
    const index_t i = domain->index_of(v);
    if (i == kNone) throw InvalidArgument("site outside the configuration window");
    return state[i];
}

void SiteConfig::set(SiteCoord v, std::int8_t s) {
    const index_t i = domain->index_of(v);
    if (i == kNone) throw InvalidArgument("site outside the configuration window");
    state[i] = s;
}

SiteConfig SiteConfig::restricted(const Window& w) const {
    SiteConfig out(Domain::make(w), 0);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const index_t j = domain->index_of(out.domain->sites()[i]);
        if (j == kNone) throw InvalidArgument("window is not contained in the configuration window");
        out.state[i] = state[j];
    }
    return out;
}

std::int64_t SiteConfig::count(std::int8_t s) const { return std::count(state.begin(), state.end(), s); }

ArmSpec ArmSpec::parse(const std::string& s) {
    ArmSpec a;
    for (char ch : s) {
        if (ch == 'o')
            a.sigma.push_back(Color::occupied);
        else if (ch == 'v')
            a.sigma.push_back(Color::vacant);
        else
            throw InvalidArgument("arm spec letters must be 'o' or 'v'");
    }
    if (a.sigma.empty()) throw InvalidArgument("arm spec must be nonempty");
    return a;
}

ArmSpec ArmSpec::alternating(int k) {
    if (k < 1) throw InvalidArgument("arm count must be >= 1");
    ArmSpec a;
    for (int i = 0; i < k; ++i) a.sigma.push_back(i % 2 == 0 ? Color::occupied : Color::vacant);
    return a;
}

std::string ArmSpec::str() const {
    std::string s;
    for (auto c : sigma) s += c == Color::occupied ? 'o' : 'v';
    return s;
}

EstimateResult EstimateResult::from_counts(std::int64_t hits, std::int64_t n, std::uint64_t seed) {
    EstimateResult r;
    r.n_samples = n;
    r.seed = seed;
    if (n > 0) {
        r.p_hat = static_cast<double>(hits) / static_cast<double>(n);
        r.std_err = std::sqrt(r.p_hat * (1.0 - r.p_hat) / static_cast<double>(n));
    }
    return r;
}

void resample(SiteConfig& c, double p, Rng& rng) {
    if (p < 0.0 || p > 1.0) throw InvalidArgument("p must lie in [0, 1]");
    auto& st = c.state;
    const std::size_t n = st.size();
    if (p == 0.0 || p == 1.0) {
        std::fill(st.begin(), st.end(), static_cast<std::int8_t>(p == 1.0));
        return;
    }
    if (p == 0.5) {
        for (std::size_t i = 0; i < n; i += 64) {
            std::uint64_t bits = rng();
            const std::size_t m = std::min<std::size_t>(64, n - i);
            for (std::size_t b = 0; b < m; ++b, bits >>= 1) st[i + b] = static_cast<std::int8_t>(bits & 1);
        }
        return;
    }
    const std::uint64_t thr = bernoulli_threshold(p);
    for (auto& s : st) s = static_cast<std::int8_t>(rng() < thr);
}

SiteConfig sample(DomainPtr d, double p, Rng& rng) {
    SiteConfig c(std::move(d), 0);
    resample(c, p, rng);
    return c;
}

SiteConfig sample(const Window& w, double p, std::uint64_t seed) {
    Rng rng(seed);
    return sample(Domain::make(w), p, rng);
}

ClusterLabeling label_clusters(const SiteConfig& c, Color color) {
    const Domain& d = *c.domain;
    const auto n = static_cast<index_t>(d.size());
    UnionFind uf(d.size());
    for (index_t i = 0; i < n; ++i) {
        if (!has_color(c.state[i], color)) continue;
        for (int k = 3; k < 6; ++k) {
            const index_t j = d.neighbor(i, k);
            if (j != kNone && has_color(c.state[j], color)) uf.unite(i, j);
        }
    }
    ClusterLabeling out;
    out.color = color;
    out.label.assign(d.size(), -1);
    std::vector<std::int32_t> root_label(d.size(), -1);
    for (index_t i = 0; i < n; ++i) {
        if (!has_color(c.state[i], color)) continue;
        const std::int32_t r = uf.find(i);
        if (root_label[r] < 0) {
            root_label[r] = static_cast<std::int32_t>(out.size.size());
            out.size.push_back(0);
        }
        out.label[i] = root_label[r];
        ++out.size[root_label[r]];
    }
    return out;
}

namespace {

// Path of the color inside the domain from a source site to a target site.
bool connects(const Domain& d, const std::vector<std::int8_t>& st, Color color, const std::vector<std::uint8_t>& src,
              const std::vector<std::uint8_t>& dst) {
    std::vector<std::uint8_t> seen(d.size(), 0);
    std::vector<index_t> stack;
    for (std::size_t i = 0; i < d.size(); ++i)
        if (src[i] && has_color(st[i], color)) seen[i] = 1, stack.push_back(static_cast<index_t>(i));
    while (!stack.empty()) {
        const index_t i = stack.back();
        stack.pop_back();
        if (dst[i]) return true;
        for (int k = 0; k < 6; ++k) {
            const index_t j = d.neighbor(i, k);
            if (j != kNone && !seen[j] && has_color(st[j], color)) seen[j] = 1, stack.push_back(j);
        }
    }
    return false;
}

std::vector<std::uint8_t> side_mask(const Domain& d, BoundarySide s) {
    std::vector<std::uint8_t> m(d.size(), 0);
    for (auto v : boundary(d.window(), s)) m[d.index_of(v)] = 1;
    return m;
}

}  // namespace

bool detect_crossing(const SiteConfig& c, const Window& r, Orientation o, Color color) {
    if (r.kind() != WindowKind::rectangle && r.kind() != WindowKind::parallelogram)
        throw InvalidArgument("crossings are defined for rectangles and parallelograms");
    const SiteConfig sub = c.restricted(r);
    const Domain& d = *sub.domain;
    if (o == Orientation::horizontal)
        return connects(d, sub.state, color, side_mask(d, BoundarySide::left), side_mask(d, BoundarySide::right));
    return connects(d, sub.state, color, side_mask(d, BoundarySide::bottom), side_mask(d, BoundarySide::top));
}

namespace {

void check_annulus(const Window& a) {
    if (a.kind() != WindowKind::annulus) throw InvalidArgument("expected an annulus window");
    if (!(a.n1() < a.n2())) throw InvalidArgument("degenerate annulus (n1 >= n2)");
}

}  // namespace

bool detect_radial_crossing(const SiteConfig& c, const Window& a, Color color) {
    check_annulus(a);
    const auto g = AnnulusGeometry::make(a);
    if (g.dom->size() == 0) throw InvalidArgument("degenerate annulus (no sites)");
    const auto st = annulus_states(c, g);
    std::vector<std::uint8_t> src(g.rim.size()), dst(g.rim.size());
    for (std::size_t i = 0; i < g.rim.size(); ++i) src[i] = g.rim[i] & kInnerRim, dst[i] = g.rim[i] & kOuterRim;
    return connects(*g.dom, st, color, src, dst);
}

bool detect_circuit(const SiteConfig& c, const Window& a, Color color) {
    return !detect_radial_crossing(c, a, color == Color::occupied ? Color::vacant : Color::occupied);
}

bool detect_arm_event(const SiteConfig& c, const Window& a, const ArmSpec& spec) {
    if (a.kind() != WindowKind::annulus) throw InvalidArgument("expected an annulus window");
    const auto g = AnnulusGeometry::make(a);
    if (g.dom->size() == 0) throw InvalidArgument("empty annulus");
    const auto st = annulus_states(c, g);
    return arm_event(g, st.data(), spec);
}

std::vector<NetRect> net_rectangles(double n, double kappa) {
    if (!(kappa >= 1.0) || !(n >= kappa)) throw InvalidArgument("net needs kappa >= 1 and n >= kappa");
    constexpr double shrink = 1e-7;  // open rectangles
    std::vector<NetRect> out;
    auto add = [&](double cx, double cy, double hx, double hy, Orientation o) {
        if (std::abs(cx) - hx < n && std::abs(cy) - hy < n)
            out.push_back({Window::rectangle(cx - hx + shrink, cx + hx - shrink, cy - hy + shrink, cy + hy - shrink), o});
    };
    const auto imax = static_cast<int>(std::ceil((n / kappa + 2.0) / 3.0)) + 1;
    for (int i = -imax; i <= imax; ++i)
        for (int j = -imax; j <= imax; ++j) {
            add(3.0 * i * kappa, (3.0 * j - 1.5) * kappa, 2.0 * kappa, 0.5 * kappa, Orientation::horizontal);
            add((3.0 * i - 1.5) * kappa, 3.0 * j * kappa, 0.5 * kappa, 2.0 * kappa, Orientation::vertical);
        }
    return out;
}

bool detect_net(const SiteConfig& c, double n, double kappa) {
    const auto rects = net_rectangles(n, kappa);
    for (const auto& r : rects)
        for (auto v : sites_in(r.rect))
            if (!c.domain->contains(v)) throw InvalidArgument("window too small to contain all net rectangles");
    for (const auto& r : rects)
        if (!detect_crossing(c, r.rect, r.long_direction, Color::occupied)) return false;
    return true;
}

EstimateResult estimate_event(const EventFn& event, std::int64_t n_samples, std::uint64_t seed, int threads) {
    if (n_samples < 1) throw InvalidArgument("n_samples must be >= 1");
    const auto hits = detail::parallel_hits(n_samples, seed, threads, [&] { return [&](Rng& rng) { return event(rng); }; });
    return EstimateResult::from_counts(hits, n_samples, seed);
}

namespace {

struct CrossingWorker {
    const Grid* g;
    double p;
    Color color;
    int need;
    detail::LazyField field;
    detail::Explorer ex;

    CrossingWorker(const Grid& grid, double p_, Color c, int k) : g(&grid), p(p_), color(c), need(k) {
        field.bind(grid.cells(), p);
        ex.bind(grid.cells());
    }
    bool operator()(Rng& rng) {
        field.next(rng);
        if (color == Color::occupied)
            return ex.crossing_clusters(*g, [&](std::int32_t c) { return field.occupied(c); }, need) >= need;
        return ex.crossing_clusters(*g, [&](std::int32_t c) { return !field.occupied(c); }, need) >= need;
    }
};

Grid rect_grid(std::int64_t n, DomainPtr& keep) {
    keep = Domain::make(Window::rectangle(0.0, 2.0 * static_cast<double>(n), 0.0, static_cast<double>(n)));
    const auto& d = *keep;
    const auto bottom = side_mask(d, BoundarySide::bottom);
    const auto top = side_mask(d, BoundarySide::top);
    return detail::make_grid(d, [&](index_t i) { return bottom[i] != 0; }, [&](index_t i) { return top[i] != 0; });
}

Grid annulus_grid(const AnnulusGeometry& g) {
    return detail::make_grid(*g.dom, [&](index_t i) { return (g.rim[i] & kInnerRim) != 0; },
                             [&](index_t i) { return (g.rim[i] & kOuterRim) != 0; });
}

std::int64_t crossing_hits(const Grid& g, double p, Color color, int need, std::int64_t n, std::uint64_t seed,
                           int threads) {
    return detail::parallel_hits(n, seed, threads, [&] { return CrossingWorker(g, p, color, need); });
}

}  // namespace

EstimateResult estimate_crossing(double p, std::int64_t n, std::int64_t n_samples, std::uint64_t seed, int threads) {
    if (p < 0.0 || p > 1.0) throw InvalidArgument("p must lie in [0, 1]");
    if (n < 1) throw InvalidArgument("n must be >= 1");
    DomainPtr keep;
    const Grid g = rect_grid(n, keep);
    return EstimateResult::from_counts(crossing_hits(g, p, Color::occupied, 1, n_samples, seed, threads), n_samples,
                                       seed);
}

std::int64_t estimate_L(double p, std::int64_t mc_budget, std::uint64_t seed, const LSearchOptions& opt,
                        std::vector<LTrace>* trace) {
    if (p < 0.0 || p > 1.0) throw InvalidArgument("p must lie in [0, 1]");
    if (p == 0.5) throw Undecided("L(p_c) is infinite");
    const double q = p > 0.5 ? 1.0 - p : p;

    auto is_small = [&](std::int64_t n) {
        DomainPtr keep;
        const Grid g = rect_grid(n, keep);
        const std::uint64_t s = hash_combine(seed, static_cast<std::uint64_t>(n));
        std::int64_t hits = 0, done = 0;
        while (done < mc_budget) {
            const std::int64_t b = std::min(opt.batch, mc_budget - done);
            hits += detail::parallel_hits(b, hash_combine(s, static_cast<std::uint64_t>(done)), opt.threads,
                                          [&] { return CrossingWorker(g, q, Color::occupied, 1); });
            done += b;
            const auto [lo, hi] = wilson_interval(hits, done, opt.z);
            const bool small = hi < opt.upper_guard;
            const bool large = lo > opt.lower_guard;
            if (small || large) {
                const bool verdict =
                    small && large ? static_cast<double>(hits) / static_cast<double>(done) <= opt.threshold : small;
                if (trace) trace->push_back({n, hits, done, verdict});
                return verdict;
            }
        }
        if (trace) trace->push_back({n, hits, done, false});
        throw Undecided("budget exhausted before the crossing estimate at n = " + std::to_string(n) +
                        " separated from the threshold");
    };

    std::int64_t hi = 1;
    while (!is_small(hi)) {
        hi *= 2;
        if (hi > opt.max_n) throw Undecided("L(p) exceeds the search limit");
    }
    std::int64_t lo = hi / 2;  // lo is large unless zero
    while (hi - lo > 1) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        if (is_small(mid))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

EstimateResult estimate_theta(double p, std::int64_t n, std::int64_t n_samples, std::uint64_t seed, int threads) {
    if (p < 0.0 || p > 1.0) throw InvalidArgument("p must lie in [0, 1]");
    if (n < 1) throw InvalidArgument("n must be >= 1");
    const auto d = Domain::make(Window::ball(static_cast<double>(n)));
    const index_t origin = d->index_of({0, 0});
    const Grid g = detail::make_grid(*d, [&](index_t i) { return i == origin; },
                                     [&](index_t i) { return d->on_inner_boundary(i); });
    return EstimateResult::from_counts(crossing_hits(g, p, Color::occupied, 1, n_samples, seed, threads), n_samples,
                                       seed);
}

namespace {

bool is_alternating_four(const ArmSpec& s) { return s.str() == "ovov" || s.str() == "vovo"; }

}  // namespace

EstimateResult estimate_arm(double p, double n1, double n2, const ArmSpec& spec, std::int64_t n_samples,
                            std::uint64_t seed, int threads) {
    if (p < 0.0 || p > 1.0) throw InvalidArgument("p must lie in [0, 1]");
    const Window a = Window::annulus(n1, n2);
    if (!(n1 < n2)) throw InvalidArgument("degenerate annulus (n1 >= n2)");
    const auto g = AnnulusGeometry::make(a);
    if (g.dom->size() == 0) throw InvalidArgument("empty annulus");
    const std::string s = spec.str();
    if (s == "o" || s == "v" || is_alternating_four(spec)) {
        const Grid grid = annulus_grid(g);
        const Color col = s == "v" ? Color::vacant : Color::occupied;
        const int need = is_alternating_four(spec) ? 2 : 1;
        return EstimateResult::from_counts(crossing_hits(grid, p, col, need, n_samples, seed, threads), n_samples,
                                           seed);
    }
    const auto hits = detail::parallel_hits(n_samples, seed, threads, [&] {
        return [&, c = SiteConfig(g.dom, 0)](Rng& rng) mutable {
            resample(c, p, rng);
            return arm_event(g, c.state.data(), spec);
        };
    });
    return EstimateResult::from_counts(hits, n_samples, seed);
}

std::pair<std::int32_t, std::int64_t> largest_cluster(const SiteConfig& c, const Window& w) {
    SiteConfig sub(Domain::make(w), 0);
    for (std::size_t i = 0; i < sub.size(); ++i) {
        const index_t j = c.domain->index_of(sub.domain->sites()[i]);
        sub.state[i] = j == kNone ? 0 : c.state[j];
    }
    const auto lab = label_clusters(sub, Color::occupied);
    std::int32_t best = -1;
    std::int64_t vol = 0;
    for (std::size_t l = 0; l < lab.size.size(); ++l)
        if (lab.size[l] > vol) vol = lab.size[l], best = static_cast<std::int32_t>(l);
    return {best, vol};
}

bool occupied_crossing_clusters_at_least(const SiteConfig& c, const Window& a, int need) {
    if (a.kind() != WindowKind::annulus) throw InvalidArgument("expected an annulus window");
    const auto g = AnnulusGeometry::make(a);
    const Grid grid = annulus_grid(g);
    const auto st = annulus_states(c, g);
    std::vector<std::int8_t> cell_state(grid.cells(), 0);
    for (std::size_t i = 0; i < st.size(); ++i) cell_state[grid.cell(g.dom->sites()[i])] = st[i];
    detail::Explorer ex;
    ex.bind(grid.cells());
    return ex.crossing_clusters(grid, [&](std::int32_t cc) { return cell_state[cc] == 1; }, need) >= need;
}

}  // namespace nearcrit
