#pragma once

#include <span>
#include <vector>

#include "hnodal/params.hpp"

namespace hnodal {

/// Values below this magnitude are flushed to exact zero.
inline constexpr double kHermiteFlush = 1e-300;

/// psi_k(u) and psi_k'(u) for k = 0..max_degree, where psi_k is the
/// L^2(R)-normalized Hermite function (2^k k! sqrt(pi))^{-1/2} H_k(u) e^{-u^2/2}.
struct HermiteTable {
  double u = 0.0;
  int max_degree = 0;
  std::vector<double> values;
  std::vector<double> derivs;
};

HermiteTable hermite_table(double u, int max_degree);

/// Fills values[0..K] (and derivs[0..K] when non-empty) without allocating.
/// `values.size()` determines K + 1.
void hermite_values(double u, std::span<double> values, std::span<double> derivs = {});

/// Sign and natural log of |psi_k(u)| for a single degree. Never underflows,
/// so the sign is meaningful far into the classically forbidden tail.
struct SignedLog {
  int sign = 0;  ///< -1, 0 or +1
  double log_abs = 0.0;
};
SignedLog hermite_signed_log(double u, int degree);

/// h-scaled eigenfunction h^{-d/4} prod_j psi_{alpha_j}(x_j / sqrt(h)).
double phi_alpha(const Vec& x, std::span<const int> alpha, const ModelParams& params);

}  // namespace hnodal
