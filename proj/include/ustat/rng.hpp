#pragma once

#include <cmath>
#include <cstdint>

namespace ustat::rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// SplitMix64 finalizer (Steele/Lea/Flood; Vigna's public-domain constants).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Seed of the index-th derived stream of a master seed. Counter-based (no
// iteration), so workers can open any stream directly and results do not
// depend on scheduling.
constexpr std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index) noexcept {
    return mix64(master + (index + 1) * kGolden);
}

class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next() noexcept { return mix64(state_ += kGolden); }
    std::uint64_t operator()() noexcept { return next(); }

    // [0, 1), 53-bit mantissa
    double uniform01() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // (0, 1]; safe as a log() or pow() argument
    double uniform01_positive() noexcept {
        return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller. Consumes exactly two uniforms per value,
    // keeping the draw count (and thus the stream) independent of the values.
    double normal() noexcept {
        const double u1 = uniform01_positive();
        const double u2 = uniform01();
        constexpr double two_pi = 6.283185307179586476925286766559;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

  private:
    std::uint64_t state_;
};

}  // namespace ustat::rng
