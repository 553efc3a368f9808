#pragma once

#include <cmath>
#include <cstdint>

namespace eulershape {

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace detail

/// Counter-based 64-bit generator: draw k of stream `seed` is a pure function
/// of (seed, k). Sequences replay exactly and substreams can be split off with
/// derive() without any shared state between workers.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t next_u64() {
        return detail::mix64(seed_ + (++counter_) * 0x9E3779B97F4A7C15ull);
    }

    /// Uniform double in [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller; consumes exactly two draws.
    double gaussian() {
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

    /// Integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

    /// Independent seed for substream `stream` of `seed` (pure function).
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
        return detail::mix64(detail::mix64(seed) ^ detail::mix64(stream + 0x632BE59BD9B4E019ull));
    }

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

}  // namespace eulershape
