#include "hnodal/params.hpp"

#include <cmath>
#include <string>

#include "hnodal/errors.hpp"

namespace hnodal {

ModelParams::ModelParams(int d, double energy, int level)
    : d_(d), energy_(energy), level_(level), h_(0.0) {
  if (d < 1) throw DomainError("dimension d must be >= 1, got " + std::to_string(d));
  if (!(energy > 0.0) || !std::isfinite(energy))
    throw DomainError("energy E must be finite and > 0");
  if (level < 0) throw DomainError("level N must be >= 0, got " + std::to_string(level));
  h_ = energy / (level + 0.5 * d);
}

double ModelParams::caustic_radius() const noexcept { return std::sqrt(2.0 * energy_); }

}  // namespace hnodal
