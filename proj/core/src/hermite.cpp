#include "hnodal/hermite.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "hnodal/errors.hpp"

namespace hnodal {

namespace {

constexpr double kRescaleHigh = 1e150;
constexpr double kRescaleLow = 1e-150;
const double kLogRescale = std::log(kRescaleHigh);
const double kPiQuarter = std::pow(std::numbers::pi, -0.25);

void require_finite(double u) {
  if (!std::isfinite(u)) throw DomainError("Hermite argument must be finite");
}

double materialize(double mantissa, double log_scale) {
  if (mantissa == 0.0) return 0.0;
  double v;
  if (log_scale > -600.0 && log_scale < 600.0) {
    v = mantissa * std::exp(log_scale);
  } else {
    v = std::copysign(std::exp(log_scale + std::log(std::abs(mantissa))), mantissa);
  }
  return std::abs(v) < kHermiteFlush ? 0.0 : v;
}

// Runs the three-term recurrence
//   psi_{k+1} = sqrt(2/(k+1)) u psi_k - sqrt(k/(k+1)) psi_{k-1}
// on mantissas sharing one running exponent; psi_0 = pi^{-1/4} e^{-u^2/2}.
template <class Visit>
void run_recurrence(double u, int max_degree, Visit&& visit) {
  double log_scale = -0.5 * u * u;
  double prev = 0.0;
  double cur = kPiQuarter;
  visit(0, cur, log_scale);
  for (int k = 0; k < max_degree; ++k) {
    const double next = std::sqrt(2.0 / (k + 1)) * u * cur - std::sqrt(double(k) / (k + 1)) * prev;
    prev = cur;
    cur = next;
    const double mag = std::max(std::abs(cur), std::abs(prev));
    if (mag > kRescaleHigh) {
      cur *= kRescaleLow;
      prev *= kRescaleLow;
      log_scale += kLogRescale;
    } else if (mag < kRescaleLow && mag > 0.0) {
      cur *= kRescaleHigh;
      prev *= kRescaleHigh;
      log_scale -= kLogRescale;
    }
    visit(k + 1, cur, log_scale);
  }
}

}  // namespace

void hermite_values(double u, std::span<double> values, std::span<double> derivs) {
  require_finite(u);
  if (values.empty()) return;
  const int max_degree = static_cast<int>(values.size()) - 1;
  const bool want_derivs = !derivs.empty();
  if (want_derivs && derivs.size() != values.size())
    throw DomainError("hermite_values: derivs must match values in length");

  // psi_{K+1} is needed for the derivative identity at the top degree.
  double top = 0.0;
  run_recurrence(u, want_derivs ? max_degree + 1 : max_degree,
                 [&](int k, double mantissa, double log_scale) {
                   const double v = materialize(mantissa, log_scale);
                   if (k <= max_degree) {
                     values[k] = v;
                   } else {
                     top = v;
                   }
                 });
  if (!want_derivs) return;
  // psi_k' = sqrt(k/2) psi_{k-1} - sqrt((k+1)/2) psi_{k+1}
  for (int k = 0; k <= max_degree; ++k) {
    const double lower = k > 0 ? std::sqrt(0.5 * k) * values[k - 1] : 0.0;
    const double upper_val = k < max_degree ? values[k + 1] : top;
    derivs[k] = lower - std::sqrt(0.5 * (k + 1)) * upper_val;
  }
}

HermiteTable hermite_table(double u, int max_degree) {
  if (max_degree < 0) throw DomainError("hermite_table: max_degree must be >= 0");
  HermiteTable t;
  t.u = u;
  t.max_degree = max_degree;
  t.values.resize(max_degree + 1);
  t.derivs.resize(max_degree + 1);
  hermite_values(u, t.values, t.derivs);
  return t;
}

SignedLog hermite_signed_log(double u, int degree) {
  require_finite(u);
  if (degree < 0) throw DomainError("hermite_signed_log: degree must be >= 0");
  SignedLog out;
  run_recurrence(u, degree, [&](int k, double mantissa, double log_scale) {
    if (k != degree) return;
    if (mantissa == 0.0) {
      out = {0, -std::numeric_limits<double>::infinity()};
    } else {
      out = {mantissa > 0.0 ? 1 : -1, log_scale + std::log(std::abs(mantissa))};
    }
  });
  return out;
}

double phi_alpha(const Vec& x, std::span<const int> alpha, const ModelParams& params) {
  const int d = params.dim();
  if (x.size() != d || static_cast<int>(alpha.size()) != d)
    throw DomainError("phi_alpha: point and multi-index must have dimension " + std::to_string(d));
  const double sqrt_h = std::sqrt(params.h());
  double prod = std::pow(params.h(), -0.25 * d);
  std::vector<double> buf;
  for (int j = 0; j < d; ++j) {
    if (alpha[j] < 0) throw DomainError("phi_alpha: multi-index entries must be >= 0");
    buf.resize(alpha[j] + 1);
    hermite_values(x[j] / sqrt_h, buf);
    prod *= buf[alpha[j]];
  }
  return prod;
}

}  // namespace hnodal
