#pragma once

#include <array>
#include <cstdint>

namespace hnodal {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). A draw is a
/// pure function of (key, counter), so any coefficient or sample can be
/// regenerated independently of every other one.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter ctr, Key key) noexcept;
};

/// Independent streams derived from one user seed.
enum class Stream : std::uint32_t {
  Coefficients = 0,
  SampleSeeds = 1,
  GaussianNorm = 2,
};

/// 64 random bits for (seed, stream, index).
std::uint64_t random_bits(std::uint64_t seed, Stream stream, std::uint64_t index) noexcept;

/// Uniform double in (0, 1], 53 bits of resolution.
double uniform_open0(std::uint64_t bits) noexcept;

/// Standard normal draw for (seed, stream, index) via Box-Muller on one
/// Philox block.
double standard_normal(std::uint64_t seed, Stream stream, std::uint64_t index) noexcept;

/// Seed of the i-th Monte-Carlo realization derived from a base seed.
std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t i) noexcept;

}  // namespace hnodal
