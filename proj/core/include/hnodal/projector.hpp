#pragma once

#include <cstddef>

#include "hnodal/ensemble.hpp"
#include "hnodal/params.hpp"

namespace hnodal {

/// Diagonal jet of the eigenspace kernel Pi(x,y) = sum_{|alpha|=N} phi_alpha(x) phi_alpha(y):
///   pi      = Pi(x,x)
///   grad[j] = d/dx_j Pi(x,y) at y = x
///   hess    = d/dx_j d/dy_k Pi(x,y) at y = x  (covariance of grad Phi at x)
struct KernelJet {
  Vec x;
  double pi = 0.0;
  Vec grad;
  Mat hess;
};

KernelJet kernel_jet_exact(const ModelParams& params, const Vec& x,
                           std::size_t capacity = kDefaultCapacity);
KernelJet kernel_jet_exact(const ModelParams& params, const MultiIndexSet& indices, const Vec& x);

/// Floating-point format for cancellation-prone sums. automatic runs binary64
/// and repeats in binary128 when the estimated roundoff exceeds
/// kRoundoffTarget relative to the result.
enum class Arithmetic { automatic, binary64, binary128 };
inline constexpr double kRoundoffTarget = 1e-12;

/// True when the library was built with binary128 support.
bool binary128_available();

double kernel_offdiag_exact(const ModelParams& params, const Vec& x, const Vec& y,
                            std::size_t capacity = kDefaultCapacity,
                            Arithmetic arithmetic = Arithmetic::automatic);

/// Trapezoid rule with `nodes` points on the contour t - i*epsilon, t in [-pi, pi).
struct MehlerQuadratureSpec {
  double epsilon = 1.0;
  int nodes = 256;
  /// Levels below N enter with weight e^{epsilon (E - E_m) / h}, so binary64
  /// roundoff grows like e^{epsilon E / h}.
  Arithmetic arithmetic = Arithmetic::automatic;

  void validate() const;

  /// epsilon = min(1, 4/(N + d/2)) inside the allowed region, the forbidden
  /// saddle beta otherwise (so the integrand carries no cancellation);
  /// nodes = max(256, 16 N).
  static MehlerQuadratureSpec defaults(const ModelParams& params, const Vec& x, const Vec& y);
};

struct MehlerResult {
  double value = 0.0;        ///< real part of the trapezoid sum
  double imag = 0.0;         ///< imaginary part, should vanish
  double alias_bound = 0.0;  ///< rigorous bound on the aliased levels N +- kM
  MehlerQuadratureSpec spec;
  Arithmetic used = Arithmetic::binary64;
  /// u * sum_k |term_k| (|log term_k| + 4) / M for the format used.
  double roundoff_estimate = 0.0;
};

inline constexpr double kDefaultAliasTolerance = 1e-12;

/// Pi(x,y) as the Fourier coefficient of the Mehler propagator on a shifted
/// contour. Throws AccuracyError when alias_bound > tolerance * |value|, and
/// RangeError when e^{epsilon E / h} would overflow.
MehlerResult kernel_mehler_quadrature(const ModelParams& params, const Vec& x, const Vec& y,
                                      const MehlerQuadratureSpec& spec,
                                      double tolerance = kDefaultAliasTolerance);
MehlerResult kernel_mehler_quadrature(const ModelParams& params, const Vec& x, const Vec& y,
                                      double tolerance = kDefaultAliasTolerance);

/// Geometric-series bound on the levels aliased onto N by an M-node rule.
/// Uses Pi_n(x,x) <= e^{s n} G_s(x) with the closed-form heat kernel
/// G_s(x) = sum_m e^{-s m} Pi_m(x,x), minimized over s.
double mehler_alias_bound(const ModelParams& params, const Vec& x, const Vec& y,
                          const MehlerQuadratureSpec& spec);

}  // namespace hnodal
