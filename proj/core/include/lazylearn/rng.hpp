#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace lazylearn {

// Deterministic RNG helpers. std::uniform_*_distribution and std::shuffle
// are implementation-defined, so every draw that must reproduce across
// compilers goes through the functions below instead.

// SplitMix64 finalizer; bijective on 64-bit values.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Decorrelated seed for a named stream of a run seed (model init,
// per-epoch shuffles, data synthesis, ... each get their own stream).
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
    return mix64(mix64(seed) ^ (stream + 0x9E3779B97F4A7C15ull));
}

inline std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
    return std::mt19937_64(stream_seed(seed, stream));
}

// Uniform double in [0, 1), 53 random bits.
inline double uniform_unit(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

inline double uniform_range(std::mt19937_64& eng, double lo, double hi) {
    return lo + (hi - lo) * uniform_unit(eng);
}

// Unbiased integer in [0, n) by rejection.
inline std::uint64_t uniform_below(std::mt19937_64& eng, std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
        v = eng();
    } while (v >= limit);
    return v % n;
}

// Fisher-Yates permutation of 0..n-1 for (seed, epoch). Identical inputs
// give the identical permutation on every platform.
std::vector<std::int64_t> shuffled_order(std::int64_t n, std::int64_t epoch, std::uint64_t seed);

// Named streams of a run seed.
namespace rng_stream {
inline constexpr std::uint64_t model_init = 0x01;
inline constexpr std::uint64_t toy_data = 0x02;
inline constexpr std::uint64_t shuffle_base = 0x1000; // + epoch
} // namespace rng_stream

} // namespace lazylearn
