#include "hnodal/rng.hpp"

#include <cmath>
#include <numbers>

namespace hnodal {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

Philox4x32::Counter block_for(std::uint64_t seed, Stream stream, std::uint64_t index) {
  const Philox4x32::Counter ctr{static_cast<std::uint32_t>(index),
                                static_cast<std::uint32_t>(index >> 32),
                                static_cast<std::uint32_t>(stream), 0u};
  const Philox4x32::Key key{static_cast<std::uint32_t>(seed),
                            static_cast<std::uint32_t>(seed >> 32)};
  return Philox4x32::block(ctr, key);
}

}  // namespace

Philox4x32::Counter Philox4x32::block(Counter ctr, Key key) noexcept {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

std::uint64_t random_bits(std::uint64_t seed, Stream stream, std::uint64_t index) noexcept {
  const auto r = block_for(seed, stream, index);
  return (static_cast<std::uint64_t>(r[1]) << 32) | r[0];
}

double uniform_open0(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

double standard_normal(std::uint64_t seed, Stream stream, std::uint64_t index) noexcept {
  const auto r = block_for(seed, stream, index);
  const double u1 = uniform_open0((static_cast<std::uint64_t>(r[1]) << 32) | r[0]);
  const double u2 = uniform_open0((static_cast<std::uint64_t>(r[3]) << 32) | r[2]);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t i) noexcept {
  return random_bits(base_seed, Stream::SampleSeeds, i);
}

}  // namespace hnodal
