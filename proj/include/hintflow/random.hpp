// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

namespace hintflow {

/// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t stream_key(std::initializer_list<std::uint64_t> parts) noexcept {
    std::uint64_t h = 0x6a09e667f3bcc909ULL;
    for (auto p : parts) h = mix64(h ^ mix64(p));
    return h;
}

// Domain tags for stream_key so that training, evaluation and task
// generation never share a stream.
inline constexpr std::uint64_t kTrainTasksTag = 0x7472616e;
inline constexpr std::uint64_t kEvalTasksTag = 0x6576616c;
inline constexpr std::uint64_t kRolloutTag = 0x726f6c6c;
inline constexpr std::uint64_t kEntropyTag = 0x656e7472;

/// Portable sampling on top of std::mt19937_64. The standard distributions
/// are implementation-defined, so run logs would not be reproducible across
/// standard libraries if we used them.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 bits of resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // Lemire-style rejection keeps the result unbiased.
        const std::uint64_t limit = (~std::uint64_t{0} / n) * n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    bool bernoulli(double p) { return uniform() < p; }

    /// Index drawn from a probability vector (assumed to sum to ~1).
    std::size_t categorical(std::span<const double> probs) {
        const double u = uniform();
        double acc = 0.0;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            acc += probs[i];
            if (u < acc) return i;
        }
        // Rounding left u above the final cumulative sum.
        for (std::size_t i = probs.size(); i-- > 0;)
            if (probs[i] > 0.0) return i;
        return probs.size() - 1;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace hintflow
