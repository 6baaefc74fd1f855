#include <cmath>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "hnodal/rng.hpp"

using namespace hnodal;

// Known-answer vectors for Philox4x32-10 from the Random123 distribution.
TEST(Philox, KnownAnswerZero) {
  const auto out = Philox4x32::block({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out[0], 0x6627e8d5u);
  EXPECT_EQ(out[1], 0xe169c58du);
  EXPECT_EQ(out[2], 0xbc57ac4cu);
  EXPECT_EQ(out[3], 0x9b00dbd8u);
}

TEST(Philox, KnownAnswerOnes) {
  const auto out = Philox4x32::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                     {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(out[0], 0x408f276du);
  EXPECT_EQ(out[1], 0x41c83b0eu);
  EXPECT_EQ(out[2], 0xa20bc7c6u);
  EXPECT_EQ(out[3], 0x6d5451fdu);
}

TEST(Philox, KnownAnswerPi) {
  const auto out = Philox4x32::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                     {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(out[0], 0xd16cfe09u);
  EXPECT_EQ(out[1], 0x94fdccebu);
  EXPECT_EQ(out[2], 0x5001e420u);
  EXPECT_EQ(out[3], 0x24126ea1u);
}

TEST(Rng, UniformIsInHalfOpenUnitInterval) {
  EXPECT_GT(uniform_open0(0), 0.0);
  EXPECT_EQ(uniform_open0(~0ull), 1.0);
  for (std::uint64_t i = 0; i < 10000; ++i) {
    const double u = uniform_open0(random_bits(42, Stream::Coefficients, i));
    ASSERT_GT(u, 0.0);
    ASSERT_LE(u, 1.0);
  }
}

TEST(Rng, PureFunctionOfArguments) {
  for (std::uint64_t i : {0ull, 1ull, 12345ull, 1ull << 40}) {
    EXPECT_EQ(random_bits(9, Stream::Coefficients, i), random_bits(9, Stream::Coefficients, i));
    EXPECT_EQ(standard_normal(9, Stream::Coefficients, i), standard_normal(9, Stream::Coefficients, i));
  }
  EXPECT_NE(random_bits(9, Stream::Coefficients, 3), random_bits(9, Stream::SampleSeeds, 3));
  EXPECT_NE(random_bits(9, Stream::Coefficients, 3), random_bits(10, Stream::Coefficients, 3));
  EXPECT_NE(random_bits(9, Stream::Coefficients, 3), random_bits(9, Stream::Coefficients, 4));
}

TEST(Rng, NormalMoments) {
  const int n = 200000;
  double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = standard_normal(2026, Stream::Coefficients, i);
    s1 += z;
    s2 += z * z;
    s3 += z * z * z;
    s4 += z * z * z * z;
  }
  EXPECT_NEAR(s1 / n, 0.0, 4.0 / std::sqrt(n));
  EXPECT_NEAR(s2 / n, 1.0, 0.02);
  EXPECT_NEAR(s3 / n, 0.0, 0.04);
  EXPECT_NEAR(s4 / n, 3.0, 0.1);
}

TEST(Rng, DerivedSeedsAreDistinct) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 5000; ++i) seen.insert(derive_seed(77, i));
  EXPECT_EQ(seen.size(), 5000u);
  EXPECT_NE(derive_seed(77, 0), derive_seed(78, 0));
}
