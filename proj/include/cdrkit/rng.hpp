#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace cdrkit::rng {

// All stochastic code in this project draws through these helpers instead of
// std::*_distribution, so that a fixed seed reproduces identical byte streams
// regardless of the standard library's distribution internals.
using Engine = std::mt19937_64;

// Unbiased integer in [0, n). n must be > 0.
inline std::uint64_t bounded(Engine& eng, std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
        std::uint64_t r = eng();
        if (r >= threshold) return r % n;
    }
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Engine& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// Standard normal via Box-Muller. Draws two uniforms, returns one deviate;
// the spare is discarded to keep the stream position independent of call
// history.
inline double normal(Engine& eng, double mean, double stddev) {
    double u1 = uniform01(eng);
    while (u1 == 0.0) u1 = uniform01(eng);
    const double u2 = uniform01(eng);
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * r * std::cos(6.283185307179586476925286766559 * u2);
}

// Knuth multiplication method; adequate for the lambdas used here (< ~100).
inline std::uint64_t poisson(Engine& eng, double lambda) {
    const double limit = std::exp(-lambda);
    double prod = 1.0;
    std::uint64_t count = 0;
    for (;;) {
        prod *= uniform01(eng);
        if (prod <= limit) return count;
        ++count;
    }
}

template <typename T>
void shuffle(Engine& eng, std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(bounded(eng, i));
        std::swap(values[i - 1], values[j]);
    }
}

}  // namespace cdrkit::rng
