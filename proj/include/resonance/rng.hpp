#pragma once

#include <array>
#include <cstdint>

namespace resonance {

std::uint64_t splitmix64(std::uint64_t& state) noexcept;

// Stateless mix of several words; used to derive per-cell seeds.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t cell, std::uint64_t run) noexcept;

/// xoshiro256++ with Box–Muller normals. The stream is fully determined by
/// the seed on every platform (no std::*_distribution involved).
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) noexcept;

    std::uint64_t next_u64() noexcept;
    double uniform() noexcept;                  // [0, 1), 53-bit resolution
    double uniform(double lo, double hi) noexcept;
    double normal() noexcept;                   // N(0, 1)
    double normal(double mean, double stddev) noexcept { return mean + stddev * normal(); }

private:
    std::array<std::uint64_t, 4> s_{};
    double cached_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace resonance
