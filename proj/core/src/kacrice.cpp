#include "hnodal/kacrice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <boost/math/special_functions/ellint_rg.hpp>

#include "hnodal/errors.hpp"
#include "hnodal/quadrature.hpp"
#include "hnodal/summation.hpp"

namespace hnodal {

namespace {

constexpr double kPi = std::numbers::pi;

// E|| chi_k || = sqrt(2) Gamma((k+1)/2) / Gamma(k/2).
double chi_mean(int k) {
  return std::sqrt(2.0) * std::exp(std::lgamma(0.5 * (k + 1)) - std::lgamma(0.5 * k));
}

// E sqrt(sum_i lam_i xi_i^2) for lam_i in (0, 1], via
//   sqrt(s) = (2 sqrt(pi))^{-1} int_0^inf (1 - e^{-t s}) t^{-3/2} dt
// and E e^{-t lam xi^2} = (1 + 2 t lam)^{-1/2}. The t-integral is mapped by
// t = exp(2 sinh v) and summed with the trapezoid rule (double-exponential
// decay at both ends).
double norm_mean_laplace(const std::vector<double>& lam) {
  constexpr double kStep = 1.0 / 64.0;
  constexpr double kHalfWidth = 6.0;
  const int n = static_cast<int>(2.0 * kHalfWidth / kStep);
  std::vector<double> terms(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double v = -kHalfWidth + i * kStep;
    const double u = 2.0 * std::sinh(v);
    const double du = 2.0 * std::cosh(v);
    const double t = std::exp(u);
    double log_p = 0.0;
    for (double l : lam) log_p -= 0.5 * std::log1p(2.0 * t * l);
    const double one_minus_p = -std::expm1(log_p);
    terms[i] = one_minus_p * std::exp(-0.5 * u) * du;
  }
  return kStep * pairwise_sum(terms) / (2.0 * std::sqrt(kPi));
}

}  // namespace

OmegaMatrix omega_matrix(const KernelJet& jet, double threshold) {
  if (!(jet.pi > threshold)) {
    throw DegenerateKernel("degenerate kernel: Pi(x,x) = " + std::to_string(jet.pi) +
                               " is below " + std::to_string(threshold) +
                               " (x = 0 with odd N, or forbidden-region underflow)",
                           jet.pi);
  }
  const double pi = jet.pi;
  Mat omega = (pi * jet.hess - jet.grad * jet.grad.transpose()) / (pi * pi);
  omega = 0.5 * (omega + omega.transpose());

  Eigen::SelfAdjointEigenSolver<Mat> eig(omega);
  const Vec& lam = eig.eigenvalues();
  const double scale = lam.cwiseAbs().maxCoeff();
  // Size of the cancellation pi * hess - grad grad^T, relative to pi^2.
  const double roundoff = 64.0 * std::numeric_limits<double>::epsilon() * jet.hess.norm() / pi;
  const double lowest = lam.minCoeff();
  OmegaMatrix out;
  out.x = jet.x;
  out.kernel_pi = pi;
  if (lowest < 0.0) {
    if (lowest < -(kPsdTolerance * scale + roundoff)) {
      throw DomainError("omega matrix is not positive semidefinite: eigenvalue " +
                        std::to_string(lowest) + " vs norm " + std::to_string(scale));
    }
    const Vec clipped = lam.cwiseMax(0.0);
    out.clipped = -lowest;
    omega = eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().transpose();
    omega = 0.5 * (omega + omega.transpose());
  }
  out.omega = std::move(omega);
  return out;
}

double gaussian_norm_mean(const Mat& cov) {
  if (cov.rows() != cov.cols() || cov.rows() == 0)
    throw DomainError("gaussian_norm_mean: covariance must be square and non-empty");
  const Mat sym = 0.5 * (cov + cov.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> eig(sym, Eigen::EigenvaluesOnly);
  const Vec& lam = eig.eigenvalues();
  const double top = lam.cwiseAbs().maxCoeff();
  if (top == 0.0) return 0.0;
  if (lam.minCoeff() < -kPsdTolerance * top)
    throw DomainError("gaussian_norm_mean: covariance is not positive semidefinite");

  // Keep the positive block; the null directions do not contribute.
  std::vector<double> pos;
  for (Eigen::Index i = 0; i < lam.size(); ++i)
    if (lam[i] > kPsdTolerance * top) pos.push_back(lam[i] / top);
  const int rank = static_cast<int>(pos.size());
  const double lo = *std::min_element(pos.begin(), pos.end());
  if (1.0 - lo <= 1e-13) return std::sqrt(top) * chi_mean(rank);
  // Rank 2: circle average of sqrt(a cos^2 + b sin^2) is (2/pi) sqrt(a) E(1 - b/a).
  // Rank 3: sphere average of sqrt(n^T L n) is Carlson's R_G.
  if (rank == 2) return std::sqrt(top) * std::sqrt(2.0 / kPi) * std::comp_ellint_2(std::sqrt(1.0 - lo));
  if (rank == 3)
    return std::sqrt(top) * chi_mean(3) * boost::math::ellint_rg(pos[0], pos[1], pos[2]);
  return std::sqrt(top) * norm_mean_laplace(pos);
}

double density(const ModelParams& params, const MultiIndexSet& indices, const Vec& x) {
  const OmegaMatrix om = omega_matrix(kernel_jet_exact(params, indices, x));
  return gaussian_norm_mean(om.omega) / std::sqrt(2.0 * kPi);
}

double density(const ModelParams& params, const Vec& x) {
  const MultiIndexSet indices = enumerate_level(params.dim(), params.level());
  return density(params, indices, x);
}

Ball::Ball(Vec c, double r) : center(std::move(c)), radius(r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("ball radius must be finite and > 0");
  if (center.size() < 1 || !center.allFinite()) throw DomainError("ball centre must be finite");
}

void check_ball_admissible(const ModelParams& params, const Ball& ball,
                           const IntegrationExclusions& ex) {
  if (ball.center.size() != params.dim())
    throw DomainError("ball centre has dimension " + std::to_string(ball.center.size()) +
                      ", expected " + std::to_string(params.dim()));
  const double c = ball.center.norm();
  const double r_min = std::max(0.0, c - ball.radius);
  const double r_max = c + ball.radius;
  if (r_min <= 0.0) throw DomainError("ball contains the origin, where the kernel degenerates");
  if (ex.origin_factor > 0.0 && r_min < ex.origin_factor * params.h()) {
    throw DomainError("ball meets the origin exclusion |x| < " + std::to_string(ex.origin_factor) +
                      " h = " + std::to_string(ex.origin_factor * params.h()));
  }
  if (ex.caustic_kappa > 0.0) {
    const double two_e = 2.0 * params.energy();
    const double width = ex.caustic_kappa * std::pow(params.h(), 2.0 / 3.0);
    if (r_min * r_min < two_e + width && r_max * r_max > two_e - width) {
      throw DomainError("ball meets the caustic band | |x|^2 - 2E | < " +
                        std::to_string(ex.caustic_kappa) + " h^{2/3} = " + std::to_string(width));
    }
  }
}

double integrate_over_ball(const Ball& ball, int order, const std::function<double(const Vec&)>& f) {
  const auto d = ball.center.size();
  if (order < 1) throw DomainError("ball quadrature order must be >= 1");
  const QuadratureRule radial = gauss_legendre(order, 0.0, ball.radius);
  const int n_phi = 2 * order;
  const double dphi = 2.0 * kPi / n_phi;
  std::vector<double> terms;
  if (d == 2) {
    terms.reserve(static_cast<std::size_t>(order) * n_phi);
    for (int i = 0; i < order; ++i) {
      const double r = radial.nodes[i];
      for (int k = 0; k < n_phi; ++k) {
        const double phi = (k + 0.5) * dphi;
        Vec x = ball.center;
        x[0] += r * std::cos(phi);
        x[1] += r * std::sin(phi);
        terms.push_back(radial.weights[i] * r * dphi * f(x));
      }
    }
  } else if (d == 3) {
    const QuadratureRule polar = gauss_legendre(order, -1.0, 1.0);
    terms.reserve(static_cast<std::size_t>(order) * order * n_phi);
    for (int i = 0; i < order; ++i) {
      const double r = radial.nodes[i];
      for (int j = 0; j < order; ++j) {
        const double ct = polar.nodes[j];
        const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
        for (int k = 0; k < n_phi; ++k) {
          const double phi = (k + 0.5) * dphi;
          Vec x = ball.center;
          x[0] += r * st * std::cos(phi);
          x[1] += r * st * std::sin(phi);
          x[2] += r * ct;
          terms.push_back(radial.weights[i] * r * r * polar.weights[j] * dphi * f(x));
        }
      }
    }
  } else {
    throw DomainError("ball integration supports d = 2 and d = 3 only (d = " +
                      std::to_string(d) + ")");
  }
  return pairwise_sum(terms);
}

double integrate_over_sector_2d(const Ball& ball, double phi0, double phi1, int order,
                                const std::function<double(const Vec&)>& f) {
  if (ball.center.size() != 2) throw DomainError("sector integration requires d = 2");
  const QuadratureRule radial = gauss_legendre(order, 0.0, ball.radius);
  const QuadratureRule angular = gauss_legendre(2 * order, phi0, phi1);
  std::vector<double> terms;
  terms.reserve(radial.nodes.size() * angular.nodes.size());
  for (std::size_t i = 0; i < radial.nodes.size(); ++i) {
    const double r = radial.nodes[i];
    for (std::size_t k = 0; k < angular.nodes.size(); ++k) {
      Vec x = ball.center;
      x[0] += r * std::cos(angular.nodes[k]);
      x[1] += r * std::sin(angular.nodes[k]);
      terms.push_back(radial.weights[i] * angular.weights[k] * r * f(x));
    }
  }
  return pairwise_sum(terms);
}

BallIntegral density_integral_ball(const ModelParams& params, const Ball& ball, int quad_order,
                                   const IntegrationExclusions& exclusions) {
  if (params.dim() == 1) {
    throw DomainError(
        "density_integral_ball: d = 1 is unsupported (rank-one eigenspace, omega = 0); "
        "use the zero count instead");
  }
  check_ball_admissible(params, ball, exclusions);
  if (quad_order < 2) throw DomainError("density_integral_ball: quad_order must be >= 2");
  const MultiIndexSet indices = enumerate_level(params.dim(), params.level());
  auto f = [&](const Vec& x) { return density(params, indices, x); };
  BallIntegral out;
  out.order = quad_order;
  out.value = integrate_over_ball(ball, quad_order, f);
  const double coarse = integrate_over_ball(ball, (quad_order + 1) / 2, f);
  out.error_estimate = std::abs(out.value - coarse);
  return out;
}

}  // namespace hnodal
