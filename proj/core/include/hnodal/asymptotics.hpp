#pragma once

#include <complex>
#include <string_view>

#include "hnodal/params.hpp"

namespace hnodal {

using cplx = std::complex<double>;

/// Allowed: |x|^2 < 2E. Forbidden: |x|^2 > 2E. CausticBand and Origin are the
/// exclusion neighbourhoods where the leading-order formulas are not uniform.
enum class RegionTag { Allowed, Forbidden, CausticBand, Origin };

std::string_view to_string(RegionTag tag);

/// Origin if |x| < origin_factor * h; CausticBand if | |x|^2 - 2E | <
/// caustic_kappa * h^{2/3}; otherwise Allowed or Forbidden.
struct RegionThresholds {
  double origin_factor = 10.0;
  double caustic_kappa = 10.0;
};

RegionTag classify_region(const ModelParams& params, const Vec& x,
                          const RegionThresholds& thresholds = {});

/// beta > 0 with cosh(beta/2) = |x| / sqrt(2E). Requires |x|^2 > 2E.
double saddle_beta(const ModelParams& params, const Vec& x);

/// g(x) = E beta - |x| sqrt(|x|^2 - 2E) < 0; Pi(x,x) ~ e^{g/h} in the forbidden region.
double forbidden_exponent(const ModelParams& params, const Vec& x);

/// c_d = Gamma((d+1)/2) / (sqrt(d pi) Gamma(d/2)).
double allowed_density_constant(int d);
/// C_d = Gamma(d/2) / (sqrt(pi) Gamma((d-1)/2)); C_1 = 0.
double forbidden_density_constant(int d);

/// h^{-1} c_d sqrt(2E - |x|^2). Requires 0 < |x|^2 < 2E.
double density_allowed_leading(const ModelParams& params, const Vec& x);

/// h^{-1/2} C_d E^{1/2} |x|^{-1/2} (|x|^2 - 2E)^{-1/4}. Requires |x|^2 > 2E; 0 for d = 1.
double density_forbidden_leading(const ModelParams& params, const Vec& x);

/// h^{-1} E (I - xhat xhat^T) / (|x| sqrt(|x|^2 - 2E)). Requires |x|^2 > 2E.
Mat omega_forbidden_leading(const ModelParams& params, const Vec& x);

/// Which constant multiplies (2E - |x|^2) in the allowed-region omega.
enum class AllowedOmegaConstant {
  /// 1/d: consistent with the two-derivative diagonal asymptotic and with c_d.
  InverseDimension,
  /// omega_{d-2} / (d omega_{d-1}), the alternative printed constant.
  SphereVolumeRatio,
};

struct AllowedOmega {
  Mat omega;
  AllowedOmegaConstant constant = AllowedOmegaConstant::InverseDimension;
};

/// h^{-2} (2E - |x|^2) / d * I. Requires 0 < |x|^2 < 2E.
AllowedOmega omega_allowed_leading(const ModelParams& params, const Vec& x);

/// omega_{d-2} / (d omega_{d-1}) with omega_{k-1} = |S^{k-1}| = 2 pi^{k/2} / Gamma(k/2).
double sphere_ratio_constant(int d);

/// |S^{d-1}| = 2 pi^{d/2} / Gamma(d/2).
double sphere_area(int d);

/// (2 pi h)^{-(d-1)} (2E - |x|^2)^{d/2 - 1} |S^{d-1}|. Requires 0 < |x|^2 < 2E.
double pi_diag_allowed_leading(const ModelParams& params, const Vec& x);

struct LogValue {
  double log_abs = 0.0;
  int sign = 1;
};

/// Leading Pi(x,x) in the forbidden region, returned as a logarithm:
/// (2 pi)^{-(d+1)/2} h^{-(d-1)/2} |x|^{1/2} e^{g/h} / (E^{1/2} (|x|^2-2E)^{1/4} sinh(beta)^{d/2}).
LogValue pi_diag_forbidden_leading(const ModelParams& params, const Vec& x);

/// Amplitude and phase derivatives at a non-degenerate critical point t0 of
/// a one-dimensional phase S. Complex entries allow critical points off the
/// real axis.
struct PhaseJet1D {
  cplx t0{0.0, 0.0};
  cplx a0{1.0, 0.0};
  cplx a1{0.0, 0.0};
  cplx a2{0.0, 0.0};
  cplx s2{1.0, 0.0};
  cplx s3{0.0, 0.0};
  cplx s4{0.0, 0.0};
};

struct StationaryPhase {
  cplx leading;
  cplx with_subleading;
};

/// int a(t) e^{i S(t)/h} dt without the factor e^{i S(t0)/h}:
///   leading         = C a0
///   with_subleading = C (a0 + (h/i) [-a2/(2 S'') + S'''' a0/(8 S''^2)
///                                     + S''' a1/(2 S''^2) - 5 S'''^2 a0/(24 S''^3)])
/// with C = sqrt(2 pi i h / S''), principal branch. For real S'' this is
/// e^{i pi/4 sgn S''} (2 pi h / |S''|)^{1/2}; for complex S'' it is the
/// continuation whose Gaussian decays along the steepest-descent direction.
StationaryPhase stationary_phase_1d(const PhaseJet1D& jet, double h);

/// Jet of the diagonal Mehler integrand at the forbidden saddle t0 = -i beta:
/// amplitude (2 pi)^{-1} (2 pi i h sin t)^{-d/2}, phase E t - |x|^2 tan(t/2).
PhaseJet1D mehler_forbidden_phase_jet(const ModelParams& params, const Vec& x);

}  // namespace hnodal
