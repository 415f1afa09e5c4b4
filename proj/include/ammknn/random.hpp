#pragma once

#include <array>
#include <cstdint>

namespace ammknn {

/// xoshiro256** 1.0 seeded through SplitMix64.
///
/// The exact bit stream is part of the synthetic-data contract: golden
/// fixtures depend on it, so neither the algorithm nor the derived
/// distributions below may change without regenerating them. Standard
/// library distributions are deliberately not used because their output is
/// implementation-defined.
class Xoshiro256 {
public:
    explicit Xoshiro256(std::uint64_t seed) noexcept;

    std::uint64_t next() noexcept;

    /// Uniform on [0, 1) with 53 bits: (next() >> 11) * 2^-53.
    double uniform() noexcept;

    /// Standard normal via Box-Muller, consuming exactly two uniforms
    /// (cosine branch only, no caching).
    double normal() noexcept;

    /// Uniform integer on [0, bound) by rejection; bound must be > 0.
    std::uint64_t below(std::uint64_t bound) noexcept;

private:
    std::array<std::uint64_t, 4> s_{};
};

/// One step of SplitMix64; advances `state`.
std::uint64_t splitmix64(std::uint64_t& state) noexcept;

} // namespace ammknn
