#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hnodal/ensemble.hpp"
#include "hnodal/kacrice.hpp"
#include "hnodal/params.hpp"

namespace hnodal {

struct ZeroCount {
  int count = 0;
  std::vector<double> zeros;  ///< bisected to width 1e-12
};

/// Zeros of the d = 1 eigenfunction phi_N on [a, b] from `resolution` evenly
/// spaced samples (0 picks the coarsest admissible one). Throws
/// AccuracyError if the spacing exceeds pi h / (8 sqrt(2E)).
ZeroCount count_zeros_1d(const ModelParams& params, double a, double b, int resolution = 0);

/// Length of the zero isocontour of the piecewise-linear interpolant of
/// `field` inside `ball`. Marching squares; the ambiguous saddle cell is
/// resolved by the sign of the mean of its four corners. Requires the
/// lattice to cover the ball with a margin of at least two cells.
double nodal_length_2d(const LatticeField2D& field, const Ball& ball);

struct NodalEstimate {
  Ball ball{Vec::Zero(2), 1.0};
  int n_samples = 0;
  double mean = 0.0;
  double std_error = 0.0;  ///< sample standard deviation / sqrt(n_samples)
  double grid_spacing = 0.0;
  std::uint64_t base_seed = 0;
};

inline constexpr double kDefaultSpacingFraction = 1.0 / 6.0;

/// Monte-Carlo mean of the nodal length in `ball` (d = 2). Realization i uses
/// seed derive_seed(base_seed, i). grid_spacing <= 0 selects h/6; anything
/// above h/5 throws AccuracyError. The result does not depend on the number
/// of threads.
NodalEstimate mc_expected_measure(const ModelParams& params, const Ball& ball, int n_samples,
                                  std::uint64_t base_seed, double grid_spacing = 0.0);

struct CompareOptions {
  double grid_spacing = 0.0;  ///< <= 0: h/6
  int quad_order = 64;
  /// Exclusions for the exact Kac-Rice integral. The exact density is valid
  /// pointwise up to the caustic, so only x = 0 is refused by default.
  IntegrationExclusions exclusions = IntegrationExclusions::none();
};

struct ComparisonReport {
  /// "kac_rice_mc" for d = 2, "weyl_count_1d" for the deterministic d = 1 case.
  std::string route;
  int d = 2;
  double energy = 1.0;
  int level = 0;
  double h = 0.0;
  Ball ball{Vec::Zero(2), 1.0};
  NodalEstimate mc;
  std::optional<double> kacrice_exact;
  double kacrice_error = 0.0;
  /// Leading-order density integrated over the ball, allowed or forbidden
  /// formula chosen per quadrature node.
  double asymptotic = 0.0;
  std::optional<double> z_score;
  /// (mc - exact)/exact and (exact - asymptotic)/asymptotic. For the d = 1
  /// route the first entry compares the count with the Weyl integral.
  std::pair<double, double> relative_gaps{0.0, 0.0};
};

ComparisonReport compare_report(const ModelParams& params, const Ball& ball, int n_samples,
                                std::uint64_t base_seed, const CompareOptions& options = {});

/// Leading-order density, allowed or forbidden by the sign of |x|^2 - 2E
/// (0 exactly on the caustic).
double density_leading(const ModelParams& params, const Vec& x);

/// int over [a, b] of h^{-1} c_1 sqrt(2E - x^2), clipped to the allowed interval.
double weyl_integral_1d(const ModelParams& params, double a, double b);

void to_json(nlohmann::json& j, const NodalEstimate& e);
void from_json(const nlohmann::json& j, NodalEstimate& e);
void to_json(nlohmann::json& j, const ComparisonReport& r);
void from_json(const nlohmann::json& j, ComparisonReport& r);

}  // namespace hnodal

template <>
struct nlohmann::adl_serializer<hnodal::Ball> {
  static hnodal::Ball from_json(const nlohmann::json& j);
  static void to_json(nlohmann::json& j, const hnodal::Ball& b);
};
