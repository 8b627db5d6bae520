#include "nearcrit/impurities.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "nearcrit/annulus.hpp"
#include "nearcrit/errors.hpp"
#include "nearcrit/io.hpp"

namespace nearcrit {

void HoleParams::validate() const {
    if (!(m > 0)) throw InvalidArgument("hole truncation scale m must be > 0");
    if (!(alpha < 2)) throw InvalidArgument("hole exponent alpha must be < 2");
    if (!(beta > 0)) throw InvalidArgument("hole exponent beta must be > 0");
    if (!(c1 > 0) || !(c2 > 0)) throw InvalidArgument("hole constants c1, c2 must be > 0");
    if (!(c3 >= 0)) throw InvalidArgument("hole constant c3 must be >= 0");
}

double HoleParams::pi() const { return std::min(1.0, c3 * std::pow(m, -beta)); }

double HoleParams::tail(double r0) const {
    if (r0 <= 0) return 1.0;
    const double r = std::max(r0, 1.0);  // no mass in (0, 1)
    return std::min(1.0, c1 * std::pow(r, alpha - 2.0) * std::exp(-c2 * r / m));
}

double HoleParams::radius(double u) const {
    if (u > tail(1.0)) return 0.0;
    // log c1 + (alpha - 2) s - (c2/m) e^s = log u in s = log r; concave and decreasing, so Newton from
    // s = 0 overshoots once and then descends monotonically
    const double lu = std::log(u), lc = std::log(c1), k = c2 / m;
    double s = 0.0;
    for (int it = 0; it < 100; ++it) {
        const double es = std::exp(s);
        const double h = lc + (alpha - 2.0) * s - k * es - lu;
        const double dh = (alpha - 2.0) - k * es;
        const double step = h / dh;
        s -= step;
        if (std::abs(step) < 1e-14 * std::max(1.0, std::abs(s))) break;
    }
    return std::exp(s);
}

const char* to_string(PhaseDomain d) {
    switch (d) {
        case PhaseDomain::I: return "I";
        case PhaseDomain::II: return "II";
        case PhaseDomain::III: return "III";
        case PhaseDomain::IV: return "IV";
    }
    return "?";
}

PhaseDomain classify_domain(double alpha, double beta) {
    if (!(alpha < 2)) throw InvalidArgument("alpha must be < 2");
    if (!(beta > 0)) throw InvalidArgument("beta must be > 0");
    if (beta <= alpha) return PhaseDomain::IV;
    if (alpha > 0.75) return PhaseDomain::I;
    return beta > 0.75 ? PhaseDomain::II : PhaseDomain::III;
}

bool on_classifier_tie(double alpha, double beta) { return alpha == 0.75 || beta == 0.75 || alpha == beta; }

HoleConfig sample_holes(const Window& w, const HoleParams& params, std::uint64_t seed, const HoleSampleOptions& opt) {
    Rng rng(seed);
    return sample_holes(w, params, rng, opt);
}

HoleConfig sample_holes(const Window& w, const HoleParams& params, Rng& rng, const HoleSampleOptions& opt) {
    params.validate();
    HoleConfig h;
    h.params = params;
    h.window = w;
    h.pad = opt.pad.value_or(4.0 * params.m);
    if (h.pad < 0) throw InvalidArgument("pad must be >= 0");
    const double pi = params.pi();
    if (pi <= 0) return h;
    const Window region = w.inflated(h.pad);
    const auto rows = row_spans(region);
    if (opt.multiplier) {
        for (const auto& r : rows)
            for (std::int32_t x = r.lo; x <= r.hi; ++x) {
                const SiteCoord v{x, r.y};
                const double q = std::clamp(pi * opt.multiplier(v), 0.0, 1.0);
                if (rng.uniform() <= q) h.holes.push_back({v, 0.0});
            }
    } else {
        // geometric skips over the row-major site sequence
        std::int64_t total = 0;
        for (const auto& r : rows) total += r.hi - r.lo + 1;
        std::int64_t pos = -1;
        const double lq = std::log1p(-pi);
        std::size_t row = 0;
        std::int64_t row_start = 0;
        while (true) {
            std::int64_t skip = 0;
            if (pi < 1.0) {
                const double g = std::floor(std::log(rng.uniform()) / lq);
                if (g > static_cast<double>(total)) break;
                skip = static_cast<std::int64_t>(g);
            }
            pos += skip + 1;
            if (pos >= total) break;
            while (pos >= row_start + (rows[row].hi - rows[row].lo + 1)) {
                row_start += rows[row].hi - rows[row].lo + 1;
                ++row;
            }
            h.holes.push_back({{rows[row].lo + static_cast<std::int32_t>(pos - row_start), rows[row].y}, 0.0});
        }
    }
    for (auto& hole : h.holes) hole.radius = params.radius(rng.uniform());
    return h;
}

bool hole_covers(const Hole& h, SiteCoord u) { return linf(u, embed(h.center)) <= h.radius + kGeomEps; }

namespace {

template <class F>
void for_each_covered(const Domain& d, const Hole& h, F&& f) {
    if (d.size() == 0) return;
    const Point c = embed(h.center);
    const double r = h.radius + kGeomEps;
    const auto ylo = std::max(d.ymin(), static_cast<std::int32_t>(std::ceil((c.y - r) / kRowHeight)));
    const auto yhi = std::min(d.ymax(), static_cast<std::int32_t>(std::floor((c.y + r) / kRowHeight)));
    for (std::int32_t y = ylo; y <= yhi; ++y) {
        const auto xlo = std::max(d.xmin(), static_cast<std::int32_t>(std::ceil(c.x - r - 0.5 * y)));
        const auto xhi = std::min(d.xmax(), static_cast<std::int32_t>(std::floor(c.x + r - 0.5 * y)));
        for (std::int32_t x = xlo; x <= xhi; ++x) {
            const index_t i = d.index_of({x, y});
            if (i != kNone) f(i);
        }
    }
}

}  // namespace

void apply_holes_inplace(SiteConfig& c, const std::vector<Hole>& holes) {
    for (const auto& h : holes) for_each_covered(*c.domain, h, [&](index_t i) { c.state[i] = std::min<std::int8_t>(c.state[i], 0); });
}

SiteConfig apply_holes(const SiteConfig& c, const HoleConfig& h, const std::vector<std::size_t>* subset) {
    SiteConfig out = c;
    if (!subset) {
        apply_holes_inplace(out, h.holes);
        return out;
    }
    for (std::size_t i : *subset) {
        if (i >= h.holes.size()) throw InvalidArgument("hole index out of range");
        for_each_covered(*out.domain, h.holes[i], [&](index_t j) { out.state[j] = std::min<std::int8_t>(out.state[j], 0); });
    }
    return out;
}

const char* to_string(HoleEvent e) {
    switch (e) {
        case HoleEvent::H: return "H";
        case HoleEvent::Hbar: return "Hbar";
        case HoleEvent::Hbarbar: return "Hbarbar";
        case HoleEvent::Hbarbar_star: return "Hbarbar_star";
        case HoleEvent::big_hole: return "big_hole";
    }
    return "?";
}

HoleEvent parse_hole_event(const std::string& s) {
    for (auto e : {HoleEvent::H, HoleEvent::Hbar, HoleEvent::Hbarbar, HoleEvent::Hbarbar_star, HoleEvent::big_hole})
        if (s == to_string(e)) return e;
    throw InvalidArgument("unknown hole event '" + s + "'");
}

namespace {

bool meets(double d, double r, double n) { return std::max(0.0, d - r) <= n && n <= d + r; }

bool hbb(double d, double r, double n1, double n2) {
    return meets(d, r, n1) && meets(d, r, n2) && d + n1 > r && !meets(d, r, 2 * n2);
}

}  // namespace

bool hole_event(const Hole& h, Point z, double n1, double n2, HoleEvent e) {
    const double d = linf(embed(h.center), z), r = h.radius;
    switch (e) {
        case HoleEvent::H: return meets(d, r, n1) && meets(d, r, n2);
        case HoleEvent::Hbar:
            return meets(d, r, n1) && meets(d, r, n2) && !meets(d, r, n1 / 2) && !meets(d, r, 2 * n2);
        case HoleEvent::Hbarbar: return hbb(d, r, n1, n2);
        case HoleEvent::Hbarbar_star:
            for (double out = 2 * n1; out <= d + r; out *= 2)
                if (hbb(d, r, n1, out)) return true;
            return false;
        case HoleEvent::big_hole:
            for (double lo = 1; 2 * lo <= n2; lo *= 2)
                if (lo >= n1 && meets(d, r, lo) && meets(d, r, 2 * lo)) return true;
            return false;
    }
    return false;
}

bool detect_hole_crossing(const HoleConfig& h, const Window& a, HoleEvent e) {
    if (a.kind() != WindowKind::annulus || !(a.n1() >= 0) || !(a.n1() < a.n2()))
        throw InvalidArgument("malformed annulus");
    if ((e == HoleEvent::Hbar || e == HoleEvent::Hbarbar || e == HoleEvent::Hbarbar_star) &&
        !(a.n1() >= 1 && a.n1() <= a.n2() / 2))
        throw InvalidArgument("this hole event needs 1 <= n1 <= n2/2");
    for (const auto& hole : h.holes)
        if (hole_event(hole, a.center(), a.n1(), a.n2(), e)) return true;
    return false;
}

HoleBounds analytic_hole_bounds(const HoleParams& p, double n1, double n2) {
    p.validate();
    if (!(n1 >= 1 && n1 <= n2 / 2)) throw InvalidArgument("bounds need 1 <= n1 <= n2/2");
    HoleBounds b;
    const double pi = p.pi();
    if (pi == 0) return b;
    // crossing holes have d <= 2n1 and r >= n1/2, or d in (2^i n1, 2^{i+1} n1] and r >= 2^{i-1} n1
    for (int i = 0; i < 60; ++i) {
        const double R = std::ldexp(n1, i + 1);
        const double t = p.tail(std::ldexp(n1, i - 1));
        const double term = pi * static_cast<double>(ball_site_count(R)) * t;
        b.bound_H += term;
        if (t < 1e-300 || (i > 2 && term < 1e-17 * b.bound_H)) break;
        if (R > 1e5) break;
    }
    // site-by-site: radius must lie in [max(d - n1, n2 - d), min(d + n1, 2 n2 - d))
    const double dmax = (2 * n2 + n1) / 2;
    for (const auto& row : row_spans(Window::ball(dmax)))
        for (std::int32_t x = row.lo; x <= row.hi; ++x) {
            const double d = linf(embed({x, row.y}), Point{});
            if (d <= (n2 - n1) / 2) continue;
            const double lo = std::max(d - n1, n2 - d), hi = std::min(d + n1, 2 * n2 - d);
            if (hi > lo) b.bound_Hbarbar += pi * (p.tail(lo) - p.tail(hi));
        }
    return b;
}

// ---------------------------------------------------------------------------------------------
// W4

namespace {

struct W4Instance {
    AnnulusGeometry g;
    std::vector<std::uint8_t> cluster;           // the single occupied crossing cluster
    std::vector<std::vector<index_t>> foot;      // reduced, distinct footprints on it
    std::vector<std::vector<index_t>> vac;       // the same holes on the whole annulus
    std::vector<std::int8_t> st;
    int verdict = -1;                            // 0/1 when decided by the reductions
};

W4Instance prepare_w4(const SiteConfig& c, const HoleConfig& h, const Window& a) {
    if (a.kind() != WindowKind::annulus || !(a.n1() < a.n2())) throw InvalidArgument("malformed annulus");
    W4Instance w;
    w.g = AnnulusGeometry::make(a);
    const auto st = annulus_states(c, w.g);
    const auto ac = analyze_annulus(w.g, st.data());
    std::vector<std::int32_t> occ;
    for (auto l : ac.crossing)
        if (ac.color[l] == Color::occupied) occ.push_back(l);
    if (occ.size() >= 2) return w.verdict = 1, w;
    if (occ.empty()) return w.verdict = 0, w;
    const std::size_t n = w.g.dom->size();
    w.cluster.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) w.cluster[i] = ac.label[i] == occ[0];
    if (disjoint_crossing_count(w.g, w.cluster, 2) < 2) return w.verdict = 0, w;

    struct Foot {
        std::vector<index_t> on, all;
    };
    std::vector<Foot> fs;
    for (const auto& hole : h.holes) {
        Foot f;
        for_each_covered(*w.g.dom, hole, [&](index_t i) {
            f.all.push_back(i);
            if (w.cluster[i]) f.on.push_back(i);
        });
        if (f.on.empty()) continue;
        std::sort(f.on.begin(), f.on.end());
        std::sort(f.all.begin(), f.all.end());
        fs.push_back(std::move(f));
    }
    // holes with equal footprints on the cluster act identically
    std::stable_sort(fs.begin(), fs.end(), [](const Foot& x, const Foot& y) { return x.on < y.on; });
    fs.erase(std::unique(fs.begin(), fs.end(), [](const Foot& x, const Foot& y) { return x.on == y.on; }), fs.end());
    std::vector<Foot> keep;
    auto mask = w.cluster;
    for (auto& f : fs) {
        for (auto i : f.on) mask[i] = 0;
        const bool alive = disjoint_crossing_count(w.g, mask, 2) >= 2;
        for (auto i : f.on) mask[i] = 1;
        if (alive) keep.push_back(std::move(f));
    }
    // larger footprints first; a footprint inside an applied union changes nothing
    std::stable_sort(keep.begin(), keep.end(), [](const Foot& x, const Foot& y) { return x.on.size() > y.on.size(); });
    for (auto& f : keep) w.foot.push_back(std::move(f.on)), w.vac.push_back(std::move(f.all));
    w.st = st;
    return w;
}

bool split_after(const W4Instance& w, const std::vector<std::size_t>& applied) {
    auto mask = w.cluster;
    for (auto k : applied)
        for (auto i : w.foot[k]) mask[i] = 0;
    return crossing_component_count(w.g, mask, 2) >= 2;
}

// Apply every hole that leaves the given paths untouched.
bool try_paths(const W4Instance& w, const std::vector<std::vector<index_t>>& paths) {
    if (paths.size() < 2) return false;
    std::vector<std::uint8_t> onpath(w.cluster.size(), 0);
    for (const auto& p : paths)
        for (auto i : p) onpath[i] = 1;
    std::vector<std::size_t> applied;
    for (std::size_t k = 0; k < w.foot.size(); ++k) {
        bool touch = false;
        for (auto i : w.foot[k]) touch |= onpath[i] != 0;
        if (!touch) applied.push_back(k);
    }
    return split_after(w, applied);
}

bool heuristic_witness(const W4Instance& w) {
    if (w.foot.empty()) return false;
    // arms touching few holes
    std::vector<double> cost(w.cluster.size(), 0.0);
    for (const auto& f : w.foot)
        for (auto i : f) cost[i] += 1.0;
    if (try_paths(w, cheapest_crossing_pair(w.g, w.cluster, cost))) return true;
    for (std::uint64_t s = 1; s <= 4; ++s)
        if (try_paths(w, disjoint_crossing_paths(w.g, w.cluster, 2, s))) return true;
    // greedy: apply small footprints first while two disjoint crossings survive
    auto mask = w.cluster;
    std::vector<std::uint16_t> hits(mask.size(), 0);
    for (std::size_t k = w.foot.size(); k-- > 0;) {
        for (auto i : w.foot[k])
            if (hits[i]++ == 0) mask[i] = 0;
        if (disjoint_crossing_count(w.g, mask, 2) < 2) {
            for (auto i : w.foot[k])
                if (--hits[i] == 0) mask[i] = 1;
            continue;
        }
        if (crossing_component_count(w.g, mask, 2) >= 2) return true;
    }
    return false;
}

// Crossing components of mask, as a site mask, and how many there are.
int crossing_part(const AnnulusGeometry& g, const std::vector<std::uint8_t>& mask, std::vector<std::uint8_t>& out) {
    const Domain& d = *g.dom;
    out.assign(d.size(), 0);
    std::vector<std::uint8_t> seen(d.size(), 0);
    std::vector<index_t> stack, comp;
    int count = 0;
    for (std::size_t s = 0; s < d.size(); ++s) {
        if (!mask[s] || seen[s] || !(g.rim[s] & kInnerRim)) continue;
        std::uint8_t touch = 0;
        seen[s] = 1;
        stack.assign(1, static_cast<index_t>(s));
        comp.clear();
        while (!stack.empty()) {
            const index_t i = stack.back();
            stack.pop_back();
            comp.push_back(i);
            touch |= g.rim[i];
            for (int k = 0; k < 6; ++k) {
                const index_t j = d.neighbor(i, k);
                if (j != kNone && mask[j] && !seen[j]) seen[j] = 1, stack.push_back(j);
            }
        }
        if (touch != (kInnerRim | kOuterRim)) continue;
        ++count;
        for (auto i : comp) out[i] = 1;
    }
    return count;
}

// Subsets are grown one hole at a time. Only holes meeting the current crossing part X can change it, and a
// hole whose removal leaves X without two disjoint crossings is useless below this node because X only shrinks.
class W4Search {
public:
    W4Search(const W4Instance& w, W4Stats* st, std::int64_t node_budget)
        : w_(w), st_(st), budget_(node_budget) {}

    // 1 found, 0 none, -1 budget exhausted
    int run() {
        std::vector<std::size_t> all(w_.foot.size());
        for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
        try {
            return dfs(w_.cluster, all) ? 1 : 0;
        } catch (const Budget&) {
            return -1;
        }
    }

private:
    struct Budget {};

    bool dfs(const std::vector<std::uint8_t>& x, const std::vector<std::size_t>& allowed) {
        if (st_) ++st_->nodes;
        if (budget_ > 0 && ++used_ > budget_) throw Budget{};
        // a crossing part already refuted with at least these holes available
        std::uint64_t key = 0x9e3779b97f4a7c15ULL;
        for (std::size_t i = 0; i < x.size(); ++i)
            if (x[i]) key = hash_combine(key, i);
        std::vector<std::uint64_t> avail((w_.foot.size() + 63) / 64, 0);
        for (auto k : allowed) avail[k / 64] |= std::uint64_t{1} << (k % 64);
        auto [lo, hi] = refuted_.equal_range(key);
        for (auto it = lo; it != hi; ++it) {
            bool sub = true;
            for (std::size_t q = 0; q < avail.size() && sub; ++q) sub = (avail[q] & ~it->second[q]) == 0;
            if (sub) return false;
        }
        std::vector<std::size_t> cand;
        std::vector<std::vector<std::uint8_t>> next;
        std::vector<std::uint8_t> y, part;
        for (auto k : allowed) {
            bool touch = false;
            for (auto i : w_.foot[k]) touch |= x[i] != 0;
            if (!touch) continue;
            y = x;
            for (auto i : w_.foot[k]) y[i] = 0;
            if (disjoint_crossing_count(w_.g, y, 2) < 2) continue;
            if (crossing_part(w_.g, y, part) >= 2) return true;
            cand.push_back(k);
            next.push_back(part);
        }
        for (std::size_t c = 0; c < cand.size(); ++c) {
            const std::vector<std::size_t> rest(cand.begin() + static_cast<std::ptrdiff_t>(c) + 1, cand.end());
            if (dfs(next[c], rest)) return true;
        }
        refuted_.emplace(key, std::move(avail));
        return false;
    }

    const W4Instance& w_;
    W4Stats* st_;
    std::int64_t budget_;
    std::int64_t used_ = 0;
    std::unordered_multimap<std::uint64_t, std::vector<std::uint64_t>> refuted_;
};

// Dual search. Two occupied crossing clusters exist iff two vacant crossing clusters do, and the vacant sites
// with holes U applied are the vacant components V plus the footprints of U. Nodes are V-components and the
// lattice pieces of each footprint. A witness is a crossing path p plus a crossing path q outside the closed
// neighbourhood of the component C1 of p in V + pieces(holes(p)); induced paths p suffice.
class ChainSearch {
public:
    ChainSearch(const W4Instance& w, std::int64_t budget) : w_(w), budget_(budget) {}

    // 1 found, 0 none, -1 undecided
    int run() {
        build();
        try {
            for (int s = 0; s < nodes(); ++s)
                if (rim_[s] & kInnerRim) {
                    path_.assign(1, s);
                    on_.assign(nodes(), 0);
                    on_[s] = 1;
                    if (extend()) return verified_ ? 1 : -1;
                }
        } catch (const Budget&) {
            return -1;
        }
        return ambiguous_ ? -1 : 0;
    }

private:
    struct Budget {};

    int nodes() const { return static_cast<int>(adj_.size()); }

    void build() {
        const Domain& d = *w_.g.dom;
        const std::size_t n = d.size();
        nv_ = 0;
        std::vector<std::int32_t> vl(n, -1);
        flood(n, [&](index_t i) { return w_.st[i] != 1 && vl[i] < 0; }, [&](index_t i) { vl[i] = nv_; },
              [&] { ++nv_; });
        owner_.assign(nv_, -1);
        std::vector<std::vector<int>> cover(n);
        std::vector<std::int32_t> piece(n, -1);
        for (int h = 0; h < static_cast<int>(w_.vac.size()); ++h) {
            for (auto i : w_.vac[h]) piece[i] = -2;
            for (auto i0 : w_.vac[h]) {
                if (piece[i0] != -2) continue;
                const int id = static_cast<int>(owner_.size());
                owner_.push_back(h);
                std::vector<index_t> st{i0};
                piece[i0] = id;
                while (!st.empty()) {
                    const index_t i = st.back();
                    st.pop_back();
                    cover[i].push_back(id);
                    for (int k = 0; k < 6; ++k) {
                        const index_t j = d.neighbor(i, k);
                        if (j != kNone && piece[j] == -2) piece[j] = id, st.push_back(j);
                    }
                }
            }
            for (auto i : w_.vac[h]) piece[i] = -1;
        }
        adj_.assign(owner_.size(), {});
        rim_.assign(owner_.size(), 0);
        pieces_.assign(w_.vac.size(), {});
        for (int u = nv_; u < nodes(); ++u) pieces_[owner_[u]].push_back(u);
        for (std::size_t i = 0; i < n; ++i) {
            if (vl[i] >= 0) rim_[vl[i]] |= w_.g.rim[i];
            for (int u : cover[i]) {
                rim_[u] |= w_.g.rim[i];
                for (int k = -1; k < 6; ++k) {
                    const index_t j = k < 0 ? static_cast<index_t>(i) : d.neighbor(static_cast<index_t>(i), k);
                    if (j == kNone) continue;
                    if (vl[j] >= 0) link(u, vl[j]);
                    for (int v : cover[j])
                        if (v != u) link(u, v);
                }
            }
        }
        for (auto& a : adj_) {
            std::sort(a.begin(), a.end());
            a.erase(std::unique(a.begin(), a.end()), a.end());
        }
    }

    template <class Open, class Mark, class Done>
    void flood(std::size_t n, Open open, Mark mark, Done done) {
        const Domain& d = *w_.g.dom;
        std::vector<index_t> st;
        for (std::size_t s = 0; s < n; ++s) {
            if (!open(static_cast<index_t>(s))) continue;
            mark(static_cast<index_t>(s));
            st.assign(1, static_cast<index_t>(s));
            while (!st.empty()) {
                const index_t i = st.back();
                st.pop_back();
                for (int k = 0; k < 6; ++k) {
                    const index_t j = d.neighbor(i, k);
                    if (j != kNone && open(j)) mark(j), st.push_back(j);
                }
            }
            done();
        }
    }

    void link(int u, int v) { adj_[u].push_back(v), adj_[v].push_back(u); }

    bool adjacent(int u, int v) const { return std::binary_search(adj_[u].begin(), adj_[u].end(), v); }

    bool extend() {
        if (budget_ > 0 && ++used_ > budget_) throw Budget{};
        const int u = path_.back();
        if (rim_[u] & kOuterRim) return test();
        for (int v : adj_[u]) {
            if (on_[v] || (rim_[v] & kInnerRim)) continue;
            bool chord = false;
            for (std::size_t t = 0; t + 1 < path_.size() && !chord; ++t) chord = adjacent(v, path_[t]);
            if (chord) continue;
            path_.push_back(v);
            on_[v] = 1;
            const bool ok = extend();
            on_[v] = 0;
            path_.pop_back();
            if (ok) return true;
        }
        return false;
    }

    bool crossing_in(const std::vector<std::uint8_t>& ok) const {
        std::vector<std::uint8_t> seen(ok.size(), 0);
        std::vector<int> st;
        for (int s = 0; s < nodes(); ++s) {
            if (!ok[s] || seen[s] || !(rim_[s] & kInnerRim)) continue;
            std::uint8_t touch = 0;
            seen[s] = 1;
            st.assign(1, s);
            while (!st.empty()) {
                const int u = st.back();
                st.pop_back();
                touch |= rim_[u];
                for (int v : adj_[u])
                    if (ok[v] && !seen[v]) seen[v] = 1, st.push_back(v);
            }
            if (touch == (kInnerRim | kOuterRim)) return true;
        }
        return false;
    }

    bool test() {
        const int nh = static_cast<int>(pieces_.size());
        std::vector<std::uint8_t> in_u1(nh, 0);
        std::uint64_t key = 0x51ed2701;
        for (int u : path_)
            if (owner_[u] >= 0 && !in_u1[owner_[u]]) in_u1[owner_[u]] = 1;
        for (int h = 0; h < nh; ++h)
            if (in_u1[h]) key = hash_combine(key, static_cast<std::uint64_t>(h));
        if (!tried_.insert(key).second) return false;

        std::vector<std::uint8_t> c1(nodes(), 0), near(nodes(), 0);
        std::vector<int> st(path_.begin(), path_.end());
        for (int u : path_) c1[u] = 1;
        while (!st.empty()) {
            const int u = st.back();
            st.pop_back();
            for (int v : adj_[u])
                if (!c1[v] && (owner_[v] < 0 || in_u1[owner_[v]])) c1[v] = 1, st.push_back(v);
        }
        for (int u = 0; u < nodes(); ++u)
            if (c1[u]) {
                near[u] = 1;
                for (int v : adj_[u]) near[v] = 1;
            }
        std::vector<std::uint8_t> clean(nh, 1);
        for (int u = nv_; u < nodes(); ++u)
            if (near[u] || in_u1[owner_[u]]) clean[owner_[u]] = 0;
        std::vector<std::uint8_t> ok(nodes(), 0);
        for (int u = 0; u < nodes(); ++u)
            ok[u] = !near[u] && (owner_[u] < 0 || in_u1[owner_[u]] || clean[owner_[u]]);
        if (crossing_in(ok)) {
            std::vector<std::size_t> applied;
            for (int h = 0; h < nh; ++h)
                if (in_u1[h] || clean[h]) applied.push_back(static_cast<std::size_t>(h));
            verified_ = split_after(w_, applied);
            return true;
        }
        // a hole with one piece next to C1 and another on q would need a finer check
        for (int u = 0; u < nodes(); ++u) ok[u] = !near[u];
        if (crossing_in(ok)) ambiguous_ = true;
        return false;
    }

    const W4Instance& w_;
    std::int64_t budget_;
    std::int64_t used_ = 0;
    int nv_ = 0;
    std::vector<int> owner_;  // -1 for V-components
    std::vector<std::vector<int>> adj_, pieces_;
    std::vector<std::uint8_t> rim_, on_;
    std::vector<int> path_;
    std::unordered_set<std::uint64_t> tried_;
    bool verified_ = false;
    bool ambiguous_ = false;
};

}  // namespace

namespace {

// 1 / 0 decided, -1 undecided within the budget, -2 too many holes for the subset search
int decide_w4(const W4Instance& w, int max_holes, std::int64_t budget, W4Stats* stats) {
    if (w.verdict >= 0) {
        if (stats) stats->decided_early = true;
        return w.verdict;
    }
    if (stats) stats->relevant = static_cast<int>(w.foot.size());
    if (w.foot.empty()) return 0;
    if (heuristic_witness(w)) {
        if (stats) stats->decided_early = true;
        return 1;
    }
    ChainSearch chain(w, budget);
    if (const int r = chain.run(); r >= 0) return r;
    if (static_cast<int>(w.foot.size()) > max_holes) return -2;
    W4Search s(w, stats, budget);
    return s.run();
}

}  // namespace

bool detect_W4(const SiteConfig& c, const HoleConfig& h, const Window& a, int max_holes, W4Stats* stats) {
    const W4Instance w = prepare_w4(c, h, a);
    if (stats) *stats = W4Stats{};
    const int r = decide_w4(w, max_holes, 0, stats);
    if (r == -2)
        throw TooManyHoles("W4 search needs " + std::to_string(w.foot.size()) + " relevant holes (limit " +
                           std::to_string(max_holes) + ")");
    return r == 1;
}

bool detect_W4_by_subsets(const SiteConfig& c, const HoleConfig& h, const Window& a) {
    const W4Instance w = prepare_w4(c, h, a);
    if (w.verdict >= 0) return w.verdict == 1;
    W4Search s(w, nullptr, 0);
    return s.run() == 1;
}

W4Bracket bracket_W4(const SiteConfig& c, const HoleConfig& h, const Window& a, int max_holes, std::int64_t node_budget) {
    W4Bracket b;
    const W4Instance w = prepare_w4(c, h, a);
    b.relevant = w.verdict >= 0 ? 0 : static_cast<int>(w.foot.size());
    const int r = decide_w4(w, max_holes, node_budget, nullptr);
    if (r >= 0) {
        b.lower = b.upper = r == 1;
        b.exact = true;
    } else {
        b.upper = true;  // the cluster still has two disjoint crossings
    }
    return b;
}

// ---------------------------------------------------------------------------------------------

std::string to_json(const HoleConfig& h) {
    Json j;
    j["params"] = {{"m", h.params.m},   {"alpha", h.params.alpha}, {"beta", h.params.beta},
                   {"c1", h.params.c1}, {"c2", h.params.c2},       {"c3", h.params.c3}};
    j["window"] = window_to_json(h.window);
    j["pad"] = h.pad;
    Json holes = Json::array();
    for (const auto& x : h.holes) holes.push_back({x.center.x, x.center.y, x.radius});
    j["holes"] = std::move(holes);
    return j.dump();
}

HoleConfig hole_config_from_json(const std::string& s) {
    const Json j = Json::parse(s);
    HoleConfig h;
    const auto& p = j.at("params");
    h.params = {p.at("m").get<double>(),  p.at("alpha").get<double>(), p.at("beta").get<double>(),
                p.at("c1").get<double>(), p.at("c2").get<double>(),    p.at("c3").get<double>()};
    h.window = window_from_json(j.at("window"));
    h.pad = j.value("pad", 0.0);
    for (const auto& x : j.at("holes"))
        h.holes.push_back({{x.at(0).get<std::int32_t>(), x.at(1).get<std::int32_t>()}, x.at(2).get<double>()});
    return h;
}

}  // namespace nearcrit
