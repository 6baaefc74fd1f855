#pragma once

#include <Eigen/Dense>

namespace hnodal {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// The triple (d, E, N) together with the semiclassical scale
/// h = E / (N + d/2). Every other quantity in the library is derived from it.
class ModelParams {
 public:
  ModelParams(int d, double energy, int level);

  int dim() const noexcept { return d_; }
  double energy() const noexcept { return energy_; }
  int level() const noexcept { return level_; }
  double h() const noexcept { return h_; }

  /// Radius of the caustic sphere |x|^2 = 2E.
  double caustic_radius() const noexcept;

  bool operator==(const ModelParams&) const = default;

 private:
  int d_;
  double energy_;
  int level_;
  double h_;
};

}  // namespace hnodal
