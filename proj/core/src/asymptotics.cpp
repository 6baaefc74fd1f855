#include "hnodal/asymptotics.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "hnodal/errors.hpp"

namespace hnodal {

namespace {

constexpr double kPi = std::numbers::pi;

void require_dim(const ModelParams& params, const Vec& x) {
  if (x.size() != params.dim())
    throw DomainError("point has dimension " + std::to_string(x.size()) + ", expected " +
                      std::to_string(params.dim()));
}

double require_allowed(const ModelParams& params, const Vec& x, const char* op) {
  require_dim(params, x);
  const double r2 = x.squaredNorm();
  if (!(r2 < 2.0 * params.energy()))
    throw DomainError(std::string(op) + ": x is not in the allowed region |x|^2 < 2E");
  if (r2 == 0.0) throw DomainError(std::string(op) + ": x = 0 is excluded");
  return r2;
}

double require_forbidden(const ModelParams& params, const Vec& x, const char* op) {
  require_dim(params, x);
  const double r2 = x.squaredNorm();
  if (!(r2 > 2.0 * params.energy()))
    throw DomainError(std::string(op) + ": x is not in the forbidden region |x|^2 > 2E");
  return r2;
}

}  // namespace

std::string_view to_string(RegionTag tag) {
  switch (tag) {
    case RegionTag::Allowed: return "allowed";
    case RegionTag::Forbidden: return "forbidden";
    case RegionTag::CausticBand: return "caustic_band";
    case RegionTag::Origin: return "origin";
  }
  return "?";
}

RegionTag classify_region(const ModelParams& params, const Vec& x, const RegionThresholds& t) {
  require_dim(params, x);
  const double r = x.norm();
  const double h = params.h();
  if (r < t.origin_factor * h) return RegionTag::Origin;
  const double gap = r * r - 2.0 * params.energy();
  if (std::abs(gap) < t.caustic_kappa * std::pow(h, 2.0 / 3.0)) return RegionTag::CausticBand;
  return gap < 0.0 ? RegionTag::Allowed : RegionTag::Forbidden;
}

double saddle_beta(const ModelParams& params, const Vec& x) {
  const double r2 = require_forbidden(params, x, "saddle_beta");
  return 2.0 * std::acosh(std::sqrt(r2 / (2.0 * params.energy())));
}

double forbidden_exponent(const ModelParams& params, const Vec& x) {
  const double beta = saddle_beta(params, x);
  const double r2 = x.squaredNorm();
  return params.energy() * beta - std::sqrt(r2) * std::sqrt(r2 - 2.0 * params.energy());
}

double allowed_density_constant(int d) {
  return std::exp(std::lgamma(0.5 * (d + 1)) - std::lgamma(0.5 * d)) / std::sqrt(d * kPi);
}

double forbidden_density_constant(int d) {
  if (d <= 1) return 0.0;  // 1 / Gamma(0) = 0
  return std::exp(std::lgamma(0.5 * d) - std::lgamma(0.5 * (d - 1))) / std::sqrt(kPi);
}

double density_allowed_leading(const ModelParams& params, const Vec& x) {
  const double r2 = require_allowed(params, x, "density_allowed_leading");
  return allowed_density_constant(params.dim()) * std::sqrt(2.0 * params.energy() - r2) / params.h();
}

double density_forbidden_leading(const ModelParams& params, const Vec& x) {
  const double r2 = require_forbidden(params, x, "density_forbidden_leading");
  if (params.dim() == 1) return 0.0;
  const double E = params.energy();
  return forbidden_density_constant(params.dim()) * std::sqrt(E) /
         (std::sqrt(params.h()) * std::pow(r2, 0.25) * std::pow(r2 - 2.0 * E, 0.25));
}

Mat omega_forbidden_leading(const ModelParams& params, const Vec& x) {
  const double r2 = require_forbidden(params, x, "omega_forbidden_leading");
  const int d = params.dim();
  const double r = std::sqrt(r2);
  const Vec xhat = x / r;
  const double scale = params.energy() / (params.h() * r * std::sqrt(r2 - 2.0 * params.energy()));
  return scale * (Mat::Identity(d, d) - xhat * xhat.transpose());
}

double sphere_area(int d) { return 2.0 * std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d); }

double sphere_ratio_constant(int d) {
  if (d < 2) throw DomainError("sphere_ratio_constant requires d >= 2");
  return sphere_area(d - 1) / (d * sphere_area(d));
}

AllowedOmega omega_allowed_leading(const ModelParams& params, const Vec& x) {
  const double r2 = require_allowed(params, x, "omega_allowed_leading");
  const int d = params.dim();
  const double h = params.h();
  AllowedOmega out;
  out.omega = ((2.0 * params.energy() - r2) / (d * h * h)) * Mat::Identity(d, d);
  out.constant = AllowedOmegaConstant::InverseDimension;
  return out;
}

double pi_diag_allowed_leading(const ModelParams& params, const Vec& x) {
  const double r2 = require_allowed(params, x, "pi_diag_allowed_leading");
  const int d = params.dim();
  return std::pow(2.0 * kPi * params.h(), -(d - 1.0)) *
         std::pow(2.0 * params.energy() - r2, 0.5 * d - 1.0) * sphere_area(d);
}

LogValue pi_diag_forbidden_leading(const ModelParams& params, const Vec& x) {
  const double r2 = require_forbidden(params, x, "pi_diag_forbidden_leading");
  const double d = params.dim();
  const double E = params.energy();
  const double h = params.h();
  const double r = std::sqrt(r2);
  const double beta = saddle_beta(params, x);
  const double g = E * beta - r * std::sqrt(r2 - 2.0 * E);
  LogValue out;
  out.sign = 1;
  out.log_abs = -0.5 * (d + 1.0) * std::log(2.0 * kPi) - 0.5 * (d - 1.0) * std::log(h) +
                0.5 * std::log(r) + g / h - 0.5 * std::log(E) - 0.25 * std::log(r2 - 2.0 * E) -
                0.5 * d * std::log(std::sinh(beta));
  return out;
}

StationaryPhase stationary_phase_1d(const PhaseJet1D& jet, double h) {
  if (jet.s2 == cplx(0.0, 0.0))
    throw DomainError("stationary_phase_1d: degenerate critical point (S'' = 0)");
  if (!(h > 0.0)) throw DomainError("stationary_phase_1d: h must be > 0");
  const cplx i(0.0, 1.0);
  const cplx c = std::sqrt(2.0 * kPi * i * h / jet.s2);
  const cplx s2 = jet.s2;
  const cplx bracket = -jet.a2 / (2.0 * s2) + jet.s4 * jet.a0 / (8.0 * s2 * s2) +
                       jet.s3 * jet.a1 / (2.0 * s2 * s2) -
                       5.0 * jet.s3 * jet.s3 * jet.a0 / (24.0 * s2 * s2 * s2);
  StationaryPhase out;
  out.leading = c * jet.a0;
  out.with_subleading = c * (jet.a0 + (h / i) * bracket);
  return out;
}

PhaseJet1D mehler_forbidden_phase_jet(const ModelParams& params, const Vec& x) {
  const double beta = saddle_beta(params, x);
  const double r2 = x.squaredNorm();
  const double d = params.dim();
  const double h = params.h();
  const cplx i(0.0, 1.0);
  const cplx t0 = -i * beta;

  // Phase E t - |x|^2 T(t), T = tan(t/2):
  //   T'   = (1 + T^2)/2
  //   T''  = T (1 + T^2)/2
  //   T''' = (1 + T^2)(1 + 3T^2)/4
  //   T''''= T (1 + T^2)(2 + 3T^2)/2
  const cplx T = std::tan(0.5 * t0);
  const cplx T2 = T * T;
  PhaseJet1D jet;
  jet.t0 = t0;
  jet.s2 = -r2 * T * (1.0 + T2) / 2.0;
  jet.s3 = -r2 * (1.0 + T2) * (1.0 + 3.0 * T2) / 4.0;
  jet.s4 = -r2 * T * (1.0 + T2) * (2.0 + 3.0 * T2) / 2.0;

  // Amplitude a(t) = (2 pi)^{-1} (2 pi h)^{-d/2} (i sin t)^{-d/2};
  //   a'  = -(d/2) cot(t) a
  //   a'' = ((d/2)^2 cot^2 t + (d/2) csc^2 t) a
  // At t0 = -i beta, i sin t0 = sinh(beta) > 0 so the real power is taken.
  const cplx sin_t = std::sin(t0);
  const cplx cot_t = std::cos(t0) / sin_t;
  const double isin = std::sinh(beta);
  const cplx a0 = std::pow(2.0 * kPi, -1.0) * std::pow(2.0 * kPi * h, -0.5 * d) * std::pow(isin, -0.5 * d);
  jet.a0 = a0;
  jet.a1 = -0.5 * d * cot_t * a0;
  jet.a2 = (0.25 * d * d * cot_t * cot_t + 0.5 * d / (sin_t * sin_t)) * a0;
  return jet;
}

}  // namespace hnodal
