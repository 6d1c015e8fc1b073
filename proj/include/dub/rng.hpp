#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

// Deterministic sampling helpers. std::mt19937_64 itself is fully specified
// by the standard, but the std distributions are not, so everything that has
// to reproduce bit-for-bit across platforms is hand-rolled here.

namespace dub {

using Rng = std::mt19937_64;

// SplitMix64 step (Steele/Lea/Flood). Used for seed mixing only.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Counter-mixed sub-seed: run i of a batch seeded with `master` gets its own
// independent stream. mix_seed(m, i) == mix_seed(m, j) only if i == j.
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t counter) {
    return splitmix64(master ^ splitmix64(counter + 0x9e3779b97f4a7c15ull));
}

// Uniform integer in [0, n). Rejection sampling; no modulo bias.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
    // threshold = 2^64 mod n; accepting r >= threshold leaves a multiple of n.
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
        const std::uint64_t r = rng();
        if (r >= threshold) return r % n;
    }
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline bool bernoulli(Rng& rng, double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return uniform01(rng) < p;
}

// Fisher-Yates with uniform_below; identical permutation on every platform.
template <typename T>
void deterministic_shuffle(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(uniform_below(rng, i));
        std::swap(v[i - 1], v[j]);
    }
}

// Index into `weights` proportionally to its (non-negative) entries.
inline std::size_t weighted_pick(Rng& rng, const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = uniform01(rng) * total;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
        u -= weights[i];
        if (u < 0.0) return i;
    }
    return weights.empty() ? 0 : weights.size() - 1;
}

// Integer from [lo, hi] with P(x) proportional to exp(-((x-mean)/sd)^2 / 2);
// a Gaussian truncated to integer support.
inline int truncated_gaussian_int(Rng& rng, double mean, double sd, int lo, int hi) {
    if (hi <= lo) return lo;
    std::vector<double> w;
    w.reserve(static_cast<std::size_t>(hi - lo + 1));
    for (int x = lo; x <= hi; ++x) {
        const double z = (static_cast<double>(x) - mean) / sd;
        w.push_back(std::exp(-0.5 * z * z));
    }
    return lo + static_cast<int>(weighted_pick(rng, w));
}

// Geometric on {lo..hi}: P(k) proportional to (1-p)^(k-lo).
inline int truncated_geometric(Rng& rng, double p, int lo, int hi) {
    if (hi <= lo) return lo;
    std::vector<double> w;
    double cur = 1.0;
    for (int k = lo; k <= hi; ++k) {
        w.push_back(cur);
        cur *= (1.0 - p);
    }
    return lo + static_cast<int>(weighted_pick(rng, w));
}

}  // namespace dub
