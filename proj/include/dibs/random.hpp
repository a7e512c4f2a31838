#pragma once

#include <cmath>
#include <cstdint>

namespace dibs {

/// splitmix64 step; used both as a generator and to mix seeds for substreams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Fold extra words into a seed so that (seed, a, b) pairs get
/// independent streams. Deterministic across platforms.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t s = seed;
    splitmix64(s);
    s ^= a + 0x9E3779B97F4A7C15ull;
    splitmix64(s);
    s ^= b + 0xD1B54A32D192ED03ull;
    return splitmix64(s);
}

/// Small deterministic generator. Distributions are written out explicitly
/// (std:: distributions are implementation-defined) so output is bit-identical
/// across standard libraries.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {
        // warm up past low-entropy seeds
        splitmix64(state_);
        splitmix64(state_);
    }

    std::uint64_t next_u64() { return splitmix64(state_); }

    /// Uniform in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    /// Uniform integer in [0, n).
    std::uint64_t uniform_index(std::uint64_t n) {
        return n > 0 ? next_u64() % n : 0;
    }

    /// Box-Muller; consumes two draws per sample.
    double normal(double mean, double sigma) {
        double u1 = next_double();
        const double u2 = next_double();
        if (u1 <= 0.0) {
            u1 = 0x1.0p-53;
        }
        const double r = std::sqrt(-2.0 * std::log(u1));
        constexpr double two_pi = 6.283185307179586476925286766559;
        return mean + sigma * r * std::cos(two_pi * u2);
    }

  private:
    std::uint64_t state_;
};

}  // namespace dibs
