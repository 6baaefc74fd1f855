#include "hnodal/ensemble.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "hnodal/errors.hpp"
#include "hnodal/hermite.hpp"
#include "hnodal/rng.hpp"

namespace hnodal {

double level_dimension(int d, int N) {
  if (d < 1 || N < 0) throw DomainError("level_dimension: need d >= 1 and N >= 0");
  // binomial(N + d - 1, d - 1) = prod_{j=1}^{d-1} (N + j) / j
  double dim = 1.0;
  for (int j = 1; j < d; ++j) dim = dim * (N + j) / j;
  return std::round(dim);
}

MultiIndexSet::MultiIndexSet(int d, int N, std::vector<int> flat)
    : d_(d), level_(N), flat_(std::move(flat)) {}

MultiIndexSet enumerate_level(int d, int N, std::size_t capacity) {
  const double dim = level_dimension(d, N);
  if (dim > static_cast<double>(capacity)) {
    throw CapacityError("eigenspace dimension " + std::to_string(dim) +
                            " exceeds capacity " + std::to_string(capacity),
                        dim);
  }
  std::vector<int> flat;
  flat.reserve(static_cast<std::size_t>(dim) * d);
  std::vector<int> alpha(d, 0);
  alpha[0] = N;
  // Decreasing lexicographic order: find the rightmost position j < d-1 with
  // alpha[j] > 0, move one unit to j+1 and push everything after j+1 into it.
  while (true) {
    flat.insert(flat.end(), alpha.begin(), alpha.end());
    int j = d - 2;
    while (j >= 0 && alpha[j] == 0) --j;
    if (j < 0) break;
    alpha[j] -= 1;
    int tail = 0;
    for (int k = j + 1; k < d; ++k) {
      tail += alpha[k];
      alpha[k] = 0;
    }
    alpha[j + 1] = tail + 1;
  }
  return MultiIndexSet(d, N, std::move(flat));
}

RandomEigenfunction make_eigenfunction(const ModelParams& params, std::vector<double> coeffs,
                                       std::uint64_t seed, std::size_t capacity) {
  auto indices = std::make_shared<const MultiIndexSet>(
      enumerate_level(params.dim(), params.level(), capacity));
  if (coeffs.size() != indices->size()) {
    throw DomainError("coefficient vector has length " + std::to_string(coeffs.size()) +
                      ", eigenspace dimension is " + std::to_string(indices->size()));
  }
  return RandomEigenfunction{params, std::move(indices), std::move(coeffs), seed};
}

RandomEigenfunction sample_eigenfunction(const ModelParams& params, std::uint64_t seed,
                                         std::size_t capacity) {
  auto indices = std::make_shared<const MultiIndexSet>(
      enumerate_level(params.dim(), params.level(), capacity));
  std::vector<double> coeffs(indices->size());
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    coeffs[i] = standard_normal(seed, Stream::Coefficients, i);
  }
  return RandomEigenfunction{params, std::move(indices), std::move(coeffs), seed};
}

FieldValues evaluate_field(const RandomEigenfunction& f, std::span<const Vec> points,
                           bool with_gradient) {
  const int d = f.params.dim();
  const int N = f.params.level();
  const double h = f.params.h();
  const double sqrt_h = std::sqrt(h);
  const double norm = std::pow(h, -0.25 * d);
  const MultiIndexSet& idx = *f.indices;
  const std::size_t n = points.size();

  FieldValues out;
  out.values.assign(n, 0.0);
  if (with_gradient) out.gradients = Mat::Zero(d, static_cast<Eigen::Index>(n));

  // Per-axis tables psi_k(x_j / sqrt h), k <= N, one row per axis.
  std::vector<double> vals(static_cast<std::size_t>(d) * (N + 1));
  std::vector<double> ders(with_gradient ? vals.size() : 0);
  std::vector<double> prefix(d + 1), suffix(d + 1);
  for (std::size_t p = 0; p < n; ++p) {
    const Vec& x = points[p];
    if (x.size() != d) throw DomainError("evaluate_field: point has wrong dimension");
    for (int j = 0; j < d; ++j) {
      if (!std::isfinite(x[j])) throw DomainError("evaluate_field: non-finite point");
      std::span<double> v(vals.data() + j * (N + 1), N + 1);
      std::span<double> dv;
      if (with_gradient) dv = std::span<double>(ders.data() + j * (N + 1), N + 1);
      hermite_values(x[j] / sqrt_h, v, dv);
    }
    double acc = 0.0;
    std::vector<double> gacc(with_gradient ? d : 0, 0.0);
    for (std::size_t a = 0; a < idx.size(); ++a) {
      const auto alpha = idx[a];
      const double c = f.coeffs[a];
      if (!with_gradient) {
        double prod = c;
        for (int j = 0; j < d; ++j) prod *= vals[j * (N + 1) + alpha[j]];
        acc += prod;
        continue;
      }
      prefix[0] = 1.0;
      for (int j = 0; j < d; ++j) prefix[j + 1] = prefix[j] * vals[j * (N + 1) + alpha[j]];
      suffix[d] = 1.0;
      for (int j = d - 1; j >= 0; --j) suffix[j] = suffix[j + 1] * vals[j * (N + 1) + alpha[j]];
      acc += c * prefix[d];
      for (int j = 0; j < d; ++j) gacc[j] += c * prefix[j] * ders[j * (N + 1) + alpha[j]] * suffix[j + 1];
    }
    out.values[p] = norm * acc;
    if (with_gradient) {
      for (int j = 0; j < d; ++j) out.gradients(j, static_cast<Eigen::Index>(p)) = norm * gacc[j] / sqrt_h;
    }
  }
  return out;
}

LatticeField2D evaluate_lattice_2d(const RandomEigenfunction& f, double x0, double y0,
                                   double spacing, int nx, int ny) {
  if (f.params.dim() != 2) throw DomainError("evaluate_lattice_2d requires d = 2");
  if (!(spacing > 0.0) || nx < 1 || ny < 1)
    throw DomainError("evaluate_lattice_2d: need spacing > 0 and a non-empty lattice");
  const int N = f.params.level();
  const double h = f.params.h();
  const double sqrt_h = std::sqrt(h);
  const MultiIndexSet& idx = *f.indices;
  const auto m = static_cast<Eigen::Index>(idx.size());

  // W(i, a) = a_a psi_{alpha_a,0}(x_i), Y(j, a) = psi_{alpha_a,1}(y_j);
  // field = W * Y^T / sqrt(h) (the h^{-d/4} prefactor for d = 2).
  Mat W(nx, m), Y(ny, m);
  std::vector<double> tab(N + 1);
  for (int i = 0; i < nx; ++i) {
    hermite_values((x0 + i * spacing) / sqrt_h, tab);
    for (Eigen::Index a = 0; a < m; ++a) W(i, a) = f.coeffs[a] * tab[idx[a][0]];
  }
  for (int j = 0; j < ny; ++j) {
    hermite_values((y0 + j * spacing) / sqrt_h, tab);
    for (Eigen::Index a = 0; a < m; ++a) Y(j, a) = tab[idx[a][1]];
  }
  const Mat F = (Y * W.transpose()) / sqrt_h;  // ny x nx, column-major

  LatticeField2D out;
  out.x0 = x0;
  out.y0 = y0;
  out.spacing = spacing;
  out.nx = nx;
  out.ny = ny;
  out.values.resize(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) out.values[static_cast<std::size_t>(j) * nx + i] = F(j, i);
  return out;
}

namespace {

void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw DomainError("coefficient dump truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

}  // namespace

void write_coefficients(std::ostream& out, const RandomEigenfunction& f) {
  put_u64(out, static_cast<std::uint64_t>(static_cast<std::int64_t>(f.params.dim())));
  put_u64(out, static_cast<std::uint64_t>(static_cast<std::int64_t>(f.params.level())));
  put_u64(out, f.seed);
  for (double c : f.coeffs) put_u64(out, std::bit_cast<std::uint64_t>(c));
}

RandomEigenfunction read_coefficients(std::istream& in, double energy, std::size_t capacity) {
  const auto d = static_cast<std::int64_t>(get_u64(in));
  const auto N = static_cast<std::int64_t>(get_u64(in));
  const std::uint64_t seed = get_u64(in);
  if (d < 1 || d > 64 || N < 0 || N > (1 << 24))
    throw DomainError("coefficient dump header is not plausible");
  const ModelParams params(static_cast<int>(d), energy, static_cast<int>(N));
  const double dim = level_dimension(params.dim(), params.level());
  if (dim > static_cast<double>(capacity))
    throw CapacityError("coefficient dump eigenspace exceeds capacity", dim);
  std::vector<double> coeffs(static_cast<std::size_t>(dim));
  for (auto& c : coeffs) c = std::bit_cast<double>(get_u64(in));
  return make_eigenfunction(params, std::move(coeffs), seed, capacity);
}

}  // namespace hnodal
