#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "hnodal/params.hpp"

namespace hnodal {

inline constexpr std::size_t kDefaultCapacity = 10'000'000;

/// binomial(N + d - 1, d - 1) as a double (exact while below 2^53).
double level_dimension(int d, int N);

/// All multi-indices alpha in Z_{>=0}^d with |alpha| = N, in decreasing
/// lexicographic order: (N,0,...,0) first, (0,...,0,N) last.
class MultiIndexSet {
 public:
  MultiIndexSet(int d, int N, std::vector<int> flat);

  int dim() const noexcept { return d_; }
  int level() const noexcept { return level_; }
  std::size_t size() const noexcept { return flat_.size() / static_cast<std::size_t>(d_); }
  std::span<const int> operator[](std::size_t i) const noexcept {
    return {flat_.data() + i * d_, static_cast<std::size_t>(d_)};
  }
  std::span<const int> flat() const noexcept { return flat_; }

 private:
  int d_;
  int level_;
  std::vector<int> flat_;
};

MultiIndexSet enumerate_level(int d, int N, std::size_t capacity = kDefaultCapacity);

/// One realization Phi_N = sum_alpha a_alpha phi_{alpha,h} with coefficients
/// stored in MultiIndexSet order. Immutable once built.
struct RandomEigenfunction {
  ModelParams params;
  std::shared_ptr<const MultiIndexSet> indices;
  std::vector<double> coeffs;
  std::uint64_t seed = 0;
};

/// i.i.d. N(0,1) coefficients; coefficient i is a pure function of (seed, i).
RandomEigenfunction sample_eigenfunction(const ModelParams& params, std::uint64_t seed,
                                         std::size_t capacity = kDefaultCapacity);

/// Same index set, caller-supplied coefficients (length must match).
RandomEigenfunction make_eigenfunction(const ModelParams& params, std::vector<double> coeffs,
                                       std::uint64_t seed = 0,
                                       std::size_t capacity = kDefaultCapacity);

struct FieldValues {
  std::vector<double> values;
  /// d x n, column i is the gradient at point i. Empty unless requested.
  Mat gradients;
};

FieldValues evaluate_field(const RandomEigenfunction& f, std::span<const Vec> points,
                           bool with_gradient = false);

/// Samples of a scalar field on the lattice x0 + i*spacing, y0 + j*spacing.
struct LatticeField2D {
  double x0 = 0.0;
  double y0 = 0.0;
  double spacing = 1.0;
  int nx = 0;
  int ny = 0;
  std::vector<double> values;  ///< row-major, index j * nx + i

  double x(int i) const noexcept { return x0 + i * spacing; }
  double y(int j) const noexcept { return y0 + j * spacing; }
  double at(int i, int j) const noexcept { return values[static_cast<std::size_t>(j) * nx + i]; }
};

/// d = 2 only. Uses per-axis Hermite tables so each lattice point costs one
/// length-(N+1) dot product.
LatticeField2D evaluate_lattice_2d(const RandomEigenfunction& f, double x0, double y0,
                                   double spacing, int nx, int ny);

/// Binary coefficient dump: int64 d, int64 N, int64 seed, then dim V_N
/// float64 coefficients; all little-endian.
void write_coefficients(std::ostream& out, const RandomEigenfunction& f);
RandomEigenfunction read_coefficients(std::istream& in, double energy,
                                      std::size_t capacity = kDefaultCapacity);

}  // namespace hnodal
