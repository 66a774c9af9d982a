#pragma once

// Portable random helpers. std::mt19937_64 is bit-specified by the standard,
// the <random> distributions are not, so every draw that feeds an output file
// goes through the functions below.

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace billprep::rng {

using Engine = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent stream for (seed, stream) pairs, e.g. one per tree or fold.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream)
{
    return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x5bd1e995ULL));
}

inline Engine make_engine(std::uint64_t seed) { return Engine(splitmix64(seed)); }

// Uniform integer in [0, n). n must be > 0.
inline std::uint64_t below(Engine& eng, std::uint64_t n)
{
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
        x = eng();
    } while (x >= limit);
    return x % n;
}

// Uniform integer in [lo, hi].
inline std::int64_t between(Engine& eng, std::int64_t lo, std::int64_t hi)
{
    return lo + static_cast<std::int64_t>(below(eng, static_cast<std::uint64_t>(hi - lo) + 1));
}

// Uniform double in [0, 1) with 53 random bits.
inline double unit(Engine& eng) { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }

inline bool bernoulli(Engine& eng, double p) { return unit(eng) < p; }

// Standard normal via Box-Muller (one value per call).
inline double normal(Engine& eng)
{
    double u1;
    do {
        u1 = unit(eng);
    } while (u1 <= 0.0);
    const double u2 = unit(eng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

template <typename T>
void shuffle(Engine& eng, std::span<T> items)
{
    for (std::size_t i = items.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(below(eng, i));
        std::swap(items[i - 1], items[j]);
    }
}

}  // namespace billprep::rng
