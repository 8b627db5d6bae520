#include "nearcrit/annulus.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>

#include "nearcrit/errors.hpp"
#include "nearcrit/union_find.hpp"

namespace nearcrit {

AnnulusGeometry AnnulusGeometry::make(const Window& a) {
    if (a.kind() != WindowKind::annulus) throw InvalidArgument("expected an annulus window");
    AnnulusGeometry g;
    g.dom = Domain::make(a);
    const std::size_t n = g.dom->size();
    g.rim.assign(n, 0);
    g.angle.resize(n);
    const Point z = a.center();
    for (std::size_t i = 0; i < n; ++i) {
        const SiteCoord v = g.dom->sites()[i];
        for (auto u : neighbors(v)) {
            const double d = linf(u, z);
            if (d <= a.n1() + kGeomEps) g.rim[i] |= kInnerRim;
            if (d > a.n2() + kGeomEps) g.rim[i] |= kOuterRim;
        }
        const Point e = embed(v);
        double th = std::atan2(e.y - z.y, e.x - z.x);
        if (th < 0) th += 2 * std::numbers::pi;
        g.angle[i] = th;
    }
    return g;
}

AnnulusClusters analyze_annulus(const AnnulusGeometry& g, const std::int8_t* states) {
    const Domain& d = *g.dom;
    const auto n = static_cast<index_t>(d.size());
    UnionFind uf(d.size());
    for (index_t i = 0; i < n; ++i) {
        const bool oi = states[i] == 1;
        for (int k = 3; k < 6; ++k) {
            const index_t j = d.neighbor(i, k);
            if (j != kNone && (states[j] == 1) == oi) uf.unite(i, j);
        }
    }
    AnnulusClusters out;
    out.label.assign(d.size(), -1);
    std::vector<std::int32_t> root_label(d.size(), -1);
    for (index_t i = 0; i < n; ++i) {
        const std::int32_t r = uf.find(i);
        if (root_label[r] < 0) {
            root_label[r] = static_cast<std::int32_t>(out.color.size());
            out.color.push_back(states[i] == 1 ? Color::occupied : Color::vacant);
            out.touches.push_back(0);
            out.angle.push_back(-1.0);
        }
        const std::int32_t l = root_label[r];
        out.label[i] = l;
        out.touches[l] |= g.rim[i];
        if ((g.rim[i] & kInnerRim) && out.angle[l] < 0) out.angle[l] = g.angle[i];
    }
    for (std::size_t l = 0; l < out.color.size(); ++l)
        if (out.touches[l] == (kInnerRim | kOuterRim)) out.crossing.push_back(static_cast<std::int32_t>(l));
    std::sort(out.crossing.begin(), out.crossing.end(),
              [&](std::int32_t a, std::int32_t b) { return out.angle[a] < out.angle[b]; });
    return out;
}

namespace {

// Split-vertex unit-capacity network; Edmonds-Karp, or successive shortest paths when costs are given.
class DisjointPaths {
public:
    DisjointPaths(const AnnulusGeometry& g, const std::vector<std::uint8_t>& mask, std::uint64_t order_seed,
                  const std::vector<double>* cost = nullptr) {
        const Domain& d = *g.dom;
        local_.assign(d.size(), -1);
        std::vector<index_t> order;
        for (std::size_t i = 0; i < d.size(); ++i)
            if (mask[i]) order.push_back(static_cast<index_t>(i));
        if (order_seed != 0) {
            Rng rng(order_seed);
            for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
        }
        std::int32_t m = 0;
        for (auto i : order) local_[i] = m++;
        site_ = order;
        src_ = 2 * m, snk_ = 2 * m + 1;
        head_.assign(static_cast<std::size_t>(2 * m + 2), -1);
        for (auto i : order) {
            const std::int32_t l = local_[i];
            add(2 * l, 2 * l + 1, cost ? (*cost)[i] : 0.0);
            if (g.rim[i] & kInnerRim) add(src_, 2 * l, 0.0);
            if (g.rim[i] & kOuterRim) add(2 * l + 1, snk_, 0.0);
            const int rot = order_seed != 0 ? static_cast<int>(splitmix64(order_seed + i) % 6) : 0;
            for (int kk = 0; kk < 6; ++kk) {
                const index_t j = d.neighbor(i, (kk + rot) % 6);
                if (j != kNone && mask[j]) add(2 * l + 1, 2 * local_[j], 0.0);
            }
        }
    }

    int run(int cap) {
        int flow = 0;
        std::vector<std::int32_t> pred(head_.size());
        std::deque<std::int32_t> q;
        while (flow < cap) {
            std::fill(pred.begin(), pred.end(), -1);
            pred[src_] = -2;
            q.assign(1, src_);
            while (!q.empty() && pred[snk_] == -1) {
                const std::int32_t u = q.front();
                q.pop_front();
                for (std::int32_t e = head_[u]; e >= 0; e = next_[e]) {
                    const std::int32_t v = to_[e];
                    if (cap_[e] > 0 && pred[v] == -1) {
                        pred[v] = e;
                        q.push_back(v);
                    }
                }
            }
            if (pred[snk_] == -1) break;
            push(pred);
            ++flow;
        }
        return flow;
    }

    // Successive shortest paths (SPFA handles the negative residual costs).
    int run_min_cost(int cap) {
        int flow = 0;
        const std::size_t n = head_.size();
        std::vector<std::int32_t> pred(n);
        std::vector<double> dist(n);
        std::vector<std::uint8_t> inq(n);
        std::deque<std::int32_t> q;
        while (flow < cap) {
            std::fill(pred.begin(), pred.end(), -1);
            std::fill(dist.begin(), dist.end(), 1e300);
            std::fill(inq.begin(), inq.end(), 0);
            dist[src_] = 0;
            pred[src_] = -2;
            q.assign(1, src_);
            while (!q.empty()) {
                const std::int32_t u = q.front();
                q.pop_front();
                inq[u] = 0;
                for (std::int32_t e = head_[u]; e >= 0; e = next_[e]) {
                    const std::int32_t v = to_[e];
                    if (cap_[e] > 0 && dist[u] + w_[e] < dist[v] - 1e-12) {
                        dist[v] = dist[u] + w_[e];
                        pred[v] = e;
                        if (!inq[v]) inq[v] = 1, q.push_back(v);
                    }
                }
            }
            if (pred[snk_] == -1) break;
            push(pred);
            ++flow;
        }
        return flow;
    }

    std::vector<std::vector<index_t>> paths() const {
        std::vector<std::vector<index_t>> out;
        for (std::int32_t e = head_[src_]; e >= 0; e = next_[e]) {
            if ((e & 1) || cap_[e] != 0) continue;
            std::vector<index_t> path;
            std::int32_t node = to_[e];
            std::size_t guard = site_.size() + 1;
            while (node != snk_ && node >= 0 && guard-- > 0) {
                path.push_back(site_[static_cast<std::size_t>(node / 2)]);
                const std::int32_t outn = node + 1;
                std::int32_t nxt = -1;
                for (std::int32_t f = head_[outn]; f >= 0; f = next_[f])
                    if (!(f & 1) && cap_[f] == 0) {
                        nxt = to_[f];
                        break;
                    }
                node = nxt;
            }
            out.push_back(std::move(path));
        }
        return out;
    }

private:
    void add(std::int32_t u, std::int32_t v, double w) {
        to_.push_back(v), cap_.push_back(1), w_.push_back(w), next_.push_back(head_[u]);
        head_[u] = static_cast<std::int32_t>(to_.size()) - 1;
        to_.push_back(u), cap_.push_back(0), w_.push_back(-w), next_.push_back(head_[v]);
        head_[v] = static_cast<std::int32_t>(to_.size()) - 1;
    }

    void push(const std::vector<std::int32_t>& pred) {
        for (std::int32_t v = snk_; v != src_;) {
            const std::int32_t e = pred[v];
            cap_[e] -= 1;
            cap_[e ^ 1] += 1;
            v = to_[e ^ 1];
        }
    }

    std::vector<std::int32_t> local_;
    std::vector<index_t> site_;
    std::vector<std::int32_t> head_, to_, next_;
    std::vector<std::int8_t> cap_;
    std::vector<double> w_;
    std::int32_t src_ = 0, snk_ = 0;
};

}  // namespace

int disjoint_crossing_count(const AnnulusGeometry& g, const std::vector<std::uint8_t>& mask, int cap) {
    if (cap <= 0) return 0;
    DisjointPaths dp(g, mask, 0);
    return dp.run(cap);
}

std::vector<std::vector<index_t>> disjoint_crossing_paths(const AnnulusGeometry& g, const std::vector<std::uint8_t>& mask,
                                                          int cap, std::uint64_t order_seed) {
    DisjointPaths dp(g, mask, order_seed);
    dp.run(cap);
    return dp.paths();
}

std::vector<std::vector<index_t>> cheapest_crossing_pair(const AnnulusGeometry& g, const std::vector<std::uint8_t>& mask,
                                                         const std::vector<double>& cost) {
    DisjointPaths dp(g, mask, 0, &cost);
    if (dp.run_min_cost(2) < 2) return {};
    return dp.paths();
}

int crossing_component_count(const AnnulusGeometry& g, const std::vector<std::uint8_t>& mask, int cap) {
    const Domain& d = *g.dom;
    std::vector<std::uint8_t> seen(d.size(), 0);
    std::vector<index_t> stack;
    int count = 0;
    for (std::size_t s = 0; s < d.size() && count < cap; ++s) {
        if (!mask[s] || seen[s] || !(g.rim[s] & kInnerRim)) continue;
        std::uint8_t touch = 0;
        seen[s] = 1;
        stack.assign(1, static_cast<index_t>(s));
        while (!stack.empty()) {
            const index_t i = stack.back();
            stack.pop_back();
            touch |= g.rim[i];
            for (int k = 0; k < 6; ++k) {
                const index_t j = d.neighbor(i, k);
                if (j != kNone && mask[j] && !seen[j]) seen[j] = 1, stack.push_back(j);
            }
        }
        if (touch == (kInnerRim | kOuterRim)) ++count;
    }
    return count;
}

std::vector<std::int8_t> annulus_states(const SiteConfig& c, const AnnulusGeometry& g) {
    std::vector<std::int8_t> st(g.dom->size());
    for (std::size_t i = 0; i < st.size(); ++i) {
        const index_t j = c.domain->index_of(g.dom->sites()[i]);
        if (j == kNone) throw InvalidArgument("annulus is not contained in the configuration window");
        st[i] = c.state[j];
    }
    return st;
}

bool arm_event(const AnnulusGeometry& g, const std::int8_t* states, const ArmSpec& spec) {
    if (spec.k() == 0) throw InvalidArgument("arm spec must be nonempty");
    const AnnulusClusters ac = analyze_annulus(g, states);
    const auto& cr = ac.crossing;
    if (cr.empty()) return false;

    // cyclic runs of sigma
    const auto& s = spec.sigma;
    const std::size_t k = s.size();
    std::vector<std::pair<Color, int>> runs;
    std::size_t start = 0;
    while (start < k && s[start] == s[(start + k - 1) % k]) {
        ++start;
        if (start == k) break;
    }
    if (start == k) {
        runs.push_back({s[0], static_cast<int>(k)});
    } else {
        for (std::size_t i = 0; i < k; ++i) {
            const Color col = s[(start + i) % k];
            if (!runs.empty() && runs.back().first == col)
                ++runs.back().second;
            else
                runs.push_back({col, 1});
        }
    }

    int need_cap[2] = {0, 0};
    for (auto& [col, len] : runs) need_cap[static_cast<int>(col)] = std::max(need_cap[static_cast<int>(col)], len);

    const std::size_t q = cr.size();
    std::vector<int> cap(q, 1);
    for (std::size_t i = 0; i < q; ++i) {
        const int want = need_cap[static_cast<int>(ac.color[cr[i]])];
        if (want >= 2) {
            std::vector<std::uint8_t> mask(g.dom->size(), 0);
            for (std::size_t j = 0; j < mask.size(); ++j) mask[j] = ac.label[j] == cr[i];
            cap[i] = disjoint_crossing_count(g, mask, want);
        } else if (want == 0) {
            cap[i] = 0;
        }
    }

    if (runs.size() == 1) {
        int total = 0;
        for (std::size_t i = 0; i < q; ++i)
            if (ac.color[cr[i]] == runs[0].first) total += cap[i];
        return total >= runs[0].second;
    }

    const std::size_t r = runs.size();
    for (std::size_t off = 0; off < q; ++off) {
        for (std::size_t rot = 0; rot < r; ++rot) {
            std::size_t used = 0;
            bool ok = true;
            for (std::size_t ri = 0; ri < r && ok; ++ri) {
                const auto& [col, len] = runs[(rot + ri) % r];
                int acc = 0;
                while (acc < len && used < q) {
                    const std::size_t ci = (off + used) % q;
                    ++used;
                    if (ac.color[cr[ci]] == col) acc += cap[ci];
                }
                ok = acc >= len;
            }
            if (ok) return true;
        }
    }
    return false;
}

}  // namespace nearcrit
