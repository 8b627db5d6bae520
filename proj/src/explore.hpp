#pragma once
// Cluster exploration on a padded dense grid, with states drawn on first touch.

#include <array>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

#include "nearcrit/domain.hpp"
#include "nearcrit/rng.hpp"

namespace nearcrit::detail {

inline constexpr std::uint8_t kIn = 1, kSource = 2, kTarget = 4;

struct Grid {
    std::int32_t xmin = 0, ymin = 0, stride = 0, rows = 0;
    std::vector<std::uint8_t> flag;
    std::vector<std::int32_t> sources;
    std::array<std::int32_t, 6> delta{};

    std::int32_t cell(SiteCoord v) const { return (v.y - ymin) * stride + (v.x - xmin); }
    SiteCoord coord(std::int32_t c) const { return {c % stride + xmin, c / stride + ymin}; }
    std::size_t cells() const { return flag.size(); }
};

// Region = sites of d; source/target flags from per-site predicates.
Grid make_grid(const Domain& d, const std::function<bool(index_t)>& is_source,
               const std::function<bool(index_t)>& is_target);

class LazyField {
public:
    void bind(std::size_t cells, double p) {
        stamp_.assign(cells, 0);
        val_.assign(cells, 0);
        gen_ = 0;
        bern_ = Bernoulli(p);
    }
    void next(Rng& rng) {
        rng_ = &rng;
        if (++gen_ == 0) {
            std::fill(stamp_.begin(), stamp_.end(), 0);
            gen_ = 1;
        }
    }
    bool occupied(std::int32_t c) {
        if (stamp_[c] != gen_) {
            stamp_[c] = gen_;
            val_[c] = bern_(*rng_);
        }
        return val_[c];
    }

private:
    std::vector<std::uint32_t> stamp_;
    std::vector<std::uint8_t> val_;
    std::uint32_t gen_ = 0;
    Bernoulli bern_{0.5};
    Rng* rng_ = nullptr;
};

class Explorer {
public:
    void bind(std::size_t cells) {
        vis_.assign(cells, 0);
        gen_ = 0;
    }

    // Number of distinct clusters (sites where `has(c)` holds) joining a source to a target, stopping at `need`.
    template <class Has>
    int crossing_clusters(const Grid& g, Has&& has, int need) {
        if (++gen_ == 0) {
            std::fill(vis_.begin(), vis_.end(), 0);
            gen_ = 1;
        }
        int count = 0;
        for (const std::int32_t s : g.sources) {
            if (vis_[s] == gen_ || !has(s)) continue;
            bool hit = false;
            vis_[s] = gen_;
            stack_.assign(1, s);
            while (!stack_.empty()) {
                const std::int32_t c = stack_.back();
                stack_.pop_back();
                if (g.flag[c] & kTarget) {
                    hit = true;
                    if (count + 1 >= need) return count + 1;
                }
                for (const std::int32_t dlt : g.delta) {
                    const std::int32_t n = c + dlt;
                    if ((g.flag[n] & kIn) && vis_[n] != gen_ && has(n)) {
                        vis_[n] = gen_;
                        stack_.push_back(n);
                    }
                }
            }
            if (hit) ++count;
        }
        return count;
    }

private:
    std::vector<std::uint32_t> vis_;
    std::uint32_t gen_ = 0;
    std::vector<std::int32_t> stack_;
};

// Sum of per-replica hits; replica r uses Rng(replica_seed(seed, r)).  make() builds one worker per thread.
template <class Make>
std::int64_t parallel_hits(std::int64_t n, std::uint64_t seed, int threads, Make&& make) {
    threads = std::max(1, threads);
    if (threads == 1 || n < 2) {
        auto work = make();
        std::int64_t hits = 0;
        Rng rng;
        for (std::int64_t r = 0; r < n; ++r) {
            rng.reseed(replica_seed(seed, static_cast<std::uint64_t>(r)));
            hits += work(rng) ? 1 : 0;
        }
        return hits;
    }
    std::vector<std::int64_t> part(static_cast<std::size_t>(threads), 0);
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            auto work = make();
            Rng rng;
            for (std::int64_t r = t; r < n; r += threads) {
                rng.reseed(replica_seed(seed, static_cast<std::uint64_t>(r)));
                part[static_cast<std::size_t>(t)] += work(rng) ? 1 : 0;
            }
        });
    }
    for (auto& th : pool) th.join();
    std::int64_t hits = 0;
    for (auto h : part) hits += h;
    return hits;
}

}  // namespace nearcrit::detail
