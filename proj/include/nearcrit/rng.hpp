#pragma once
// Random streams.
//
// Master seed -> replica seed: replica_seed(seed, r) = seed ^ splitmix64(r + 1).
// Each replica then drives a xoshiro256** engine seeded through splitmix64.
// Per-site streams (forest fire) hash (seed, stream tag, x, y, counter).

#include <cmath>
#include <cstdint>
#include <limits>

namespace nearcrit {

constexpr std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t replica_seed(std::uint64_t seed, std::uint64_t r) {
    return seed ^ splitmix64(r + 1);
}

constexpr std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) {
    return splitmix64(h ^ (v + 0x632be59bd9b4e019ULL + (h << 6) + (h >> 2)));
}

inline double u64_to_unit(std::uint64_t v) {
    // (0, 1] so that -log(u) is finite
    return (static_cast<double>(v >> 11) + 1.0) * 0x1.0p-53;
}

class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed = 0) { reseed(seed); }

    void reseed(std::uint64_t seed) {
        std::uint64_t z = seed;
        for (auto& w : s_) {
            z += 0x9e3779b97f4a7c15ULL;
            w = splitmix64(z);
        }
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    double uniform() { return u64_to_unit((*this)()); }  // (0, 1]
    double exponential(double rate) { return -std::log(uniform()) / rate; }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
};

// Threshold t such that (rng() < t) has probability p (up to 2^-64). p = 1 handled by caller.
inline std::uint64_t bernoulli_threshold(double p) {
    if (p <= 0.0) return 0;
    if (p >= 1.0) return std::numeric_limits<std::uint64_t>::max();
    return static_cast<std::uint64_t>(std::ldexp(p, 64));
}

// Bernoulli draw: occupied iff rng() < threshold, except p >= 1 always true.
struct Bernoulli {
    explicit Bernoulli(double p) : thr(bernoulli_threshold(p)), all(p >= 1.0) {}
    bool operator()(Rng& rng) const { return all || rng() < thr; }
    std::uint64_t thr;
    bool all;
};

}  // namespace nearcrit
