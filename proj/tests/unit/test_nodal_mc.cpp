#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>
#if defined(_OPENMP)
#include <omp.h>
#endif

#include "hnodal/errors.hpp"
#include "hnodal/hermite.hpp"
#include "hnodal/kacrice.hpp"
#include "hnodal/nodal_mc.hpp"
#include "hnodal/rng.hpp"

using namespace hnodal;

namespace {

const double kPi = std::numbers::pi;

Vec point(std::initializer_list<double> v) {
  Vec x(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double c : v) x[i++] = c;
  return x;
}

template <class F>
LatticeField2D sample_lattice(F&& f, double x0, double y0, double s, int nx, int ny) {
  LatticeField2D L{x0, y0, s, nx, ny, std::vector<double>(static_cast<std::size_t>(nx) * ny)};
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) L.values[static_cast<std::size_t>(j) * nx + i] = f(L.x(i), L.y(j));
  return L;
}

}  // namespace

TEST(CountZeros1D, GroundStateHasNone) {
  ModelParams p(1, 1.0, 0);
  EXPECT_EQ(count_zeros_1d(p, -5, 5).count, 0);
  EXPECT_EQ(count_zeros_1d(p, 0.2, 0.9).count, 0);
}

TEST(CountZeros1D, HermiteHasExactlyNRealZeros) {
  for (int N : {1, 2, 7, 20, 50, 100}) {
    ModelParams p(1, 1.0, N);
    const auto zc = count_zeros_1d(p, -3, 3);
    EXPECT_EQ(zc.count, N) << N;
    const double R = p.caustic_radius();
    for (double z : zc.zeros) EXPECT_LT(std::abs(z), R);
    for (std::size_t i = 1; i < zc.zeros.size(); ++i) EXPECT_GT(zc.zeros[i], zc.zeros[i - 1]);
  }
}

TEST(CountZeros1D, ZerosAreAccurate) {
  ModelParams p(1, 1.0, 20);
  const auto zc = count_zeros_1d(p, -3, 3);
  const double sh = std::sqrt(p.h());
  for (double z : zc.zeros) {
    const int a = hermite_signed_log((z - 1e-11) / sh, 20).sign;
    const int b = hermite_signed_log((z + 1e-11) / sh, 20).sign;
    EXPECT_NE(a, b) << z;
  }
  // N = 3: psi_3 vanishes at 0 and +-sqrt(3/2) in the u variable.
  ModelParams q(1, 1.0, 3);
  const auto z3 = count_zeros_1d(q, -2.5, 2.5);
  ASSERT_EQ(z3.count, 3);
  EXPECT_NEAR(z3.zeros[0], -std::sqrt(1.5 * q.h()), 1e-11);
  EXPECT_NEAR(z3.zeros[1], 0.0, 1e-11);
  EXPECT_NEAR(z3.zeros[2], std::sqrt(1.5 * q.h()), 1e-11);
}

TEST(CountZeros1D, ForbiddenIntervalIsZeroFree) {
  ModelParams p(1, 1.0, 20);
  EXPECT_EQ(count_zeros_1d(p, 1.5, 3).count, 0);
  EXPECT_EQ(count_zeros_1d(p, -6, -1.5).count, 0);
}

TEST(CountZeros1D, Errors) {
  ModelParams p(1, 1.0, 20);
  EXPECT_THROW(count_zeros_1d(p, -3, 3, 50), AccuracyError);
  EXPECT_THROW(count_zeros_1d(ModelParams(2, 1.0, 20), -3, 3), DomainError);
  EXPECT_THROW(count_zeros_1d(p, 1, 1), DomainError);
}

TEST(WeylCount, AllowedIntegralIsNPlusHalf) {
  for (int N : {20, 50, 100}) {
    ModelParams p(1, 1.0, N);
    const double R = p.caustic_radius();
    EXPECT_NEAR(weyl_integral_1d(p, -R, R), N + 0.5, 1e-12 * N);
    EXPECT_NEAR(weyl_integral_1d(p, -10, 10), N + 0.5, 1e-12 * N);
    EXPECT_EQ(count_zeros_1d(p, -R, R).count, N);
  }
}

TEST(NodalLength, StraightLineThroughCentre) {
  const Ball b(point({0.013, -0.021}), 0.5);
  for (double s : {0.05, 0.031, 0.0173}) {
    for (double x0 : {-0.8, -0.7931}) {
      const int n = static_cast<int>(std::ceil(1.6 / s)) + 1;
      const auto L = sample_lattice([&](double x, double) { return x - 0.013; }, x0, x0, s, n, n);
      EXPECT_NEAR(nodal_length_2d(L, b), 1.0, 1e-12) << s << " " << x0;
    }
  }
}

TEST(NodalLength, TiltedLine) {
  const Ball b(point({0.0, 0.0}), 0.4);
  const double a = 0.37;
  const auto L = sample_lattice([&](double x, double y) { return std::cos(a) * x + std::sin(a) * y - 0.1; },
                                -0.6, -0.6, 0.01, 121, 121);
  EXPECT_NEAR(nodal_length_2d(L, b), 2 * std::sqrt(0.16 - 0.01), 1e-12);
}

TEST(NodalLength, CircleOracle) {
  const double rho = 0.5;
  const double s = rho / 200;
  const int n = static_cast<int>(std::ceil(1.8 / s)) + 1;
  const auto L = sample_lattice([&](double x, double y) { return x * x + y * y - rho * rho; }, -0.9, -0.9, s, n, n);
  EXPECT_NEAR(nodal_length_2d(L, Ball(point({0.0, 0.0}), 0.8)) / (2 * kPi * rho), 1.0, 1e-3);
}

TEST(NodalLength, QuarterTurnInvariance) {
  ModelParams p(2, 1.0, 20);
  const auto f = sample_eigenfunction(p, 4242);
  const double s = p.h() / 6;
  const int n = 81;
  const double x0 = -0.5 * (n - 1) * s + 0.7;
  const double y0 = -0.5 * (n - 1) * s - 0.2;
  const auto L = evaluate_lattice_2d(f, x0, y0, s, n, n);
  // rotate samples by 90 degrees about the lattice centre
  LatticeField2D R = L;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) R.values[static_cast<std::size_t>(j) * n + i] = L.at(j, n - 1 - i);
  const double cx = x0 + 0.5 * (n - 1) * s, cy = y0 + 0.5 * (n - 1) * s;
  const Ball b(point({cx + 0.03, cy - 0.05}), 0.15);
  // R(u, v) = L(v, -u) about the centre, so the ball offset (a, b) maps to (-b, a)
  const Ball br(point({cx + 0.05, cy + 0.03}), 0.15);
  EXPECT_NEAR(nodal_length_2d(R, br), nodal_length_2d(L, b), 1e-13);
}

TEST(NodalLength, RefinementOfRandomField) {
  ModelParams p(2, 1.0, 20);
  const auto f = sample_eigenfunction(p, 17);
  const Ball b(point({0.8, 0.0}), 0.3);
  auto length = [&](double s) {
    const int n = static_cast<int>(std::ceil(0.8 / s)) + 1;
    const auto L = evaluate_lattice_2d(f, 0.4, -0.4, s, n, n);
    return nodal_length_2d(L, b);
  };
  const double coarse = length(p.h() / 6);
  const double fine = length(p.h() / 12);
  EXPECT_LT(std::abs(fine / coarse - 1), 5e-3);
}

TEST(NodalLength, CoverageAndFiniteness) {
  const auto L = sample_lattice([](double x, double) { return x; }, -1, -1, 0.1, 21, 21);
  EXPECT_NO_THROW(nodal_length_2d(L, Ball(point({0.0, 0.0}), 0.8)));
  EXPECT_THROW(nodal_length_2d(L, Ball(point({0.0, 0.0}), 0.85)), DomainError);
  EXPECT_THROW(nodal_length_2d(L, Ball(point({0.3, 0.0}), 0.6)), DomainError);
  auto bad = L;
  bad.values[5] = std::nan("");
  EXPECT_THROW(nodal_length_2d(bad, Ball(point({0.0, 0.0}), 0.5)), DomainError);
}

TEST(MonteCarlo, DeterministicAcrossRunsAndThreads) {
  ModelParams p(2, 1.0, 20);
  const Ball b(point({0.8, 0.0}), 0.3);
  const auto a = mc_expected_measure(p, b, 1, 555);
  const auto c = mc_expected_measure(p, b, 1, 555);
  EXPECT_EQ(a.mean, c.mean);
  EXPECT_EQ(a.std_error, 0.0);
  const auto m1 = mc_expected_measure(p, b, 37, 555);
#if defined(_OPENMP)
  const int saved = omp_get_max_threads();
  omp_set_num_threads(3);
  const auto m3 = mc_expected_measure(p, b, 37, 555);
  omp_set_num_threads(saved);
#else
  const auto m3 = mc_expected_measure(p, b, 37, 555);
#endif
  EXPECT_EQ(m1.mean, m3.mean);
  EXPECT_EQ(m1.std_error, m3.std_error);
  EXPECT_GE(m1.mean, 0.0);
}

TEST(MonteCarlo, SampleSeedsFollowDerivation) {
  ModelParams p(2, 1.0, 12);
  const Ball b(point({0.6, 0.2}), 0.2);
  const auto est = mc_expected_measure(p, b, 1, 31337);
  const auto f = sample_eigenfunction(p, derive_seed(31337, 0));
  const double s = p.h() / 6;
  const int cells = static_cast<int>(std::ceil(0.4 / s)) + 6;
  const auto L = evaluate_lattice_2d(f, 0.6 - 0.5 * cells * s, 0.2 - 0.5 * cells * s, s, cells + 1, cells + 1);
  EXPECT_NEAR(est.mean, nodal_length_2d(L, b), 1e-12);
  EXPECT_DOUBLE_EQ(est.grid_spacing, s);
  EXPECT_EQ(est.base_seed, 31337u);
}

TEST(MonteCarlo, Errors) {
  ModelParams p(2, 1.0, 20);
  const Ball b(point({0.8, 0.0}), 0.3);
  EXPECT_THROW(mc_expected_measure(p, b, 10, 1, p.h() / 4), AccuracyError);
  EXPECT_NO_THROW(mc_expected_measure(p, b, 2, 1, p.h() / 5));
  EXPECT_THROW(mc_expected_measure(ModelParams(3, 1.0, 5), Ball(point({0.5, 0, 0}), 0.1), 10, 1), DomainError);
  EXPECT_THROW(mc_expected_measure(p, b, 0, 1), DomainError);
}

TEST(MonteCarlo, AgreesWithKacRiceAllowedAndForbidden) {
  ModelParams p(2, 1.0, 20);
  const std::uint64_t seed = 20261014;
  const auto ra = compare_report(p, Ball(point({0.8, 0.0}), 0.3), 2000, seed);
  const auto rf = compare_report(p, Ball(point({1.7, 0.0}), 0.3), 2000, seed);
  ASSERT_TRUE(ra.z_score && rf.z_score);
  EXPECT_LE(std::abs(*ra.z_score), 3.0);
  EXPECT_LE(std::abs(*rf.z_score), 3.0);
  EXPECT_GT(ra.mc.mean, 3 * rf.mc.mean);
  EXPECT_NEAR(*ra.z_score, (ra.mc.mean - *ra.kacrice_exact) / ra.mc.std_error, 1e-12);
}

TEST(CompareReport, AllowedTrendAtHigherLevel) {
  const Ball b(point({0.8, 0.0}), 0.3);
  const auto r20 = compare_report(ModelParams(2, 1.0, 20), b, 200, 99);
  const auto r40 = compare_report(ModelParams(2, 1.0, 40), b, 400, 99);
  EXPECT_LT(std::abs(r40.relative_gaps.first), 3 * r40.mc.std_error / r40.mc.mean);
  EXPECT_LT(std::abs(r40.relative_gaps.second), std::abs(r20.relative_gaps.second));
  EXPECT_EQ(r40.route, "kac_rice_mc");
}

TEST(CompareReport, DimensionOneRoutesToWeylCount) {
  ModelParams p(1, 1.0, 20);
  const auto rep = compare_report(p, Ball(point({0.0}), 3.0), 100, 1);
  EXPECT_EQ(rep.route, "weyl_count_1d");
  EXPECT_EQ(rep.mc.mean, 20.0);
  EXPECT_FALSE(rep.z_score.has_value());
  EXPECT_FALSE(rep.kacrice_exact.has_value());
  EXPECT_NEAR(rep.asymptotic, 20.5, 1e-12);
  EXPECT_THROW(compare_report(ModelParams(3, 1.0, 4), Ball(point({0.5, 0, 0}), 0.1), 10, 1), DomainError);
}

TEST(CompareReport, JsonRoundTrip) {
  ModelParams p(2, 1.0, 10);
  const auto rep = compare_report(p, Ball(point({0.7, 0.1}), 0.2), 30, 8);
  const nlohmann::json j = rep;
  const auto back = nlohmann::json::parse(j.dump()).get<ComparisonReport>();
  EXPECT_EQ(nlohmann::json(back), j);
  EXPECT_EQ(back.mc.mean, rep.mc.mean);
  EXPECT_EQ(back.mc.std_error, rep.mc.std_error);
  EXPECT_EQ(*back.z_score, *rep.z_score);
  EXPECT_EQ(back.ball.center, rep.ball.center);
  EXPECT_EQ(back.relative_gaps, rep.relative_gaps);
  EXPECT_TRUE(j.at("mc").contains("stderr"));

  const auto r1 = compare_report(ModelParams(1, 1.0, 5), Ball(point({0.0}), 2.0), 1, 1);
  const nlohmann::json j1 = r1;
  EXPECT_TRUE(j1.at("z_score").is_null());
  EXPECT_EQ(nlohmann::json(j1.get<ComparisonReport>()), j1);
}
