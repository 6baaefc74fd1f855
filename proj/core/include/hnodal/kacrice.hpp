#pragma once

#include <functional>

#include "hnodal/ensemble.hpp"
#include "hnodal/params.hpp"
#include "hnodal/projector.hpp"

namespace hnodal {

inline constexpr double kDegenerateThreshold = 1e-280;
/// Negative eigenvalues down to -kPsdTolerance * ||omega|| are roundoff.
inline constexpr double kPsdTolerance = 1e-10;

/// Normalized derivative covariance of the field conditioned on a zero:
/// omega = (pi * hess - grad grad^T) / pi^2 = d_x d_y log Pi(x,y) at y = x.
struct OmegaMatrix {
  Vec x;
  Mat omega;
  double kernel_pi = 0.0;
  /// Largest |eigenvalue| removed by clipping to PSD (0 when already PSD).
  double clipped = 0.0;
};

/// Throws DegenerateKernel if jet.pi <= threshold.
OmegaMatrix omega_matrix(const KernelJet& jet, double threshold = kDegenerateThreshold);

/// E || cov^{1/2} xi || for xi ~ N(0, I_d).
double gaussian_norm_mean(const Mat& cov);

/// Expected nodal density F(x) = (2 pi)^{-1/2} E|| omega^{1/2} xi ||.
double density(const ModelParams& params, const Vec& x);
double density(const ModelParams& params, const MultiIndexSet& indices, const Vec& x);

struct Ball {
  Vec center;
  double radius;
  Ball(Vec c, double r);
};

/// Sets a ball integration must avoid. A non-positive factor disables that
/// exclusion; the degenerate point x = 0 itself is always refused.
struct IntegrationExclusions {
  /// Refuse balls meeting { | |x|^2 - 2E | < caustic_kappa * h^{2/3} }.
  double caustic_kappa = 10.0;
  /// Refuse balls meeting { |x| < origin_factor * h }.
  double origin_factor = 10.0;

  static IntegrationExclusions none() { return {0.0, 0.0}; }
};

/// Throws DomainError naming the violated exclusion.
void check_ball_admissible(const ModelParams& params, const Ball& ball,
                           const IntegrationExclusions& exclusions);

struct BallIntegral {
  double value = 0.0;
  /// |I(order) - I(order/2)|; conservative for a spectrally convergent rule.
  double error_estimate = 0.0;
  int order = 0;
};

/// Polar (d = 2) or spherical (d = 3) product rule about the ball centre:
/// Gauss-Legendre in the radius (and in cos(theta) for d = 3), periodic
/// trapezoid in the azimuth. `order` radial nodes, 2*order azimuthal nodes.
double integrate_over_ball(const Ball& ball, int order, const std::function<double(const Vec&)>& f);

/// d = 2 annular sector {r in [0, R], phi in [phi0, phi1]} around ball.center,
/// Gauss-Legendre in both coordinates.
double integrate_over_sector_2d(const Ball& ball, double phi0, double phi1, int order,
                                const std::function<double(const Vec&)>& f);

/// Integral of the exact Kac-Rice density over a ball (d = 2, 3).
BallIntegral density_integral_ball(const ModelParams& params, const Ball& ball, int quad_order,
                                   const IntegrationExclusions& exclusions = {});

}  // namespace hnodal
