#pragma once

#include <cstdint>
#include <random>

namespace aqds {

/// Deterministic random source used throughout the library.
///
/// Wraps std::mt19937_64 but performs all output mappings manually, so that a
/// given seed produces an identical stream on every platform and standard
/// library (std::uniform_*_distribution would not guarantee that).
class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, bound). Rejection-sampled, bias-free.
    /// bound must be nonzero.
    std::uint64_t next_below(std::uint64_t bound) {
        // Reject values in the final partial copy of [0, bound).
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound + 1) % bound;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x > limit);
        return x % bound;
    }

    bool bernoulli(double p) { return next_double() < p; }

private:
    std::mt19937_64 engine_;
};

}  // namespace aqds
