#pragma once

#include <cmath>
#include <cstdint>

namespace swarmsim {

// Counter-based PRNG used everywhere in the project.
//
// The n-th output of a stream with key k is splitmix64_finalize(k + n*GOLDEN),
// i.e. the SplitMix64 sequence seeded at k. Streams for unrelated purposes
// (arena layout, each robot's walk legs, each PSO evaluation, ...) derive
// distinct keys by folding integer tag words into the master seed, so draws
// in one stream never depend on how many values another stream consumed.
// This keeps runs reproducible bit-for-bit and makes parallel evaluation
// order-independent.

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Folds one tag word into a key. Chain calls to derive nested streams.
constexpr std::uint64_t fold(std::uint64_t key, std::uint64_t word) {
    return mix64(key + kGolden + mix64(word + kGolden));
}

constexpr std::uint64_t fold_words(std::uint64_t key) { return key; }

template <typename... Rest>
constexpr std::uint64_t fold_words(std::uint64_t key, std::uint64_t word, Rest... rest) {
    return fold_words(fold(key, word), rest...);
}

// Stream tags. New purposes get new tags; values are stable across versions
// because they feed the reproducibility contract.
namespace streams {
constexpr std::uint64_t kArena = 1;
constexpr std::uint64_t kInitPose = 2;
constexpr std::uint64_t kLegs = 3;      // + robot id
constexpr std::uint64_t kAvoid = 4;     // + robot id
constexpr std::uint64_t kBatchRun = 5;  // + fill key + run index
constexpr std::uint64_t kPsoInit = 6;
constexpr std::uint64_t kPsoStep = 7;  // + iteration + particle
constexpr std::uint64_t kPsoEval = 8;  // + iteration + particle + eval index
}  // namespace streams

class RngStream {
public:
    explicit RngStream(std::uint64_t key) : key_(key) {}

    std::uint64_t next_u64() { return mix64(key_ + (++counter_) * kGolden); }

    // [0, 1)
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // [0, n), n > 0
    std::uint64_t uniform_below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    // Standard normal via Box-Muller (cosine branch only, one draw per call).
    double normal() {
        double u1 = 1.0 - uniform01();  // (0, 1], keeps log() finite
        double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    std::uint64_t key() const { return key_; }
    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

template <typename... Words>
RngStream derive_stream(std::uint64_t seed, Words... words) {
    return RngStream(fold_words(seed, static_cast<std::uint64_t>(words)...));
}

}  // namespace swarmsim
