#include "hnodal/projector.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#ifdef HNODAL_HAVE_FLOAT128
#include <quadmath.h>
#endif

#include "hnodal/errors.hpp"
#include "hnodal/hermite.hpp"
#include "hnodal/summation.hpp"

namespace hnodal {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

void check_point(const ModelParams& params, const Vec& x, const char* what) {
  if (x.size() != params.dim())
    throw DomainError(std::string(what) + ": point has dimension " + std::to_string(x.size()) +
                      ", expected " + std::to_string(params.dim()));
  if (!x.allFinite()) throw DomainError(std::string(what) + ": non-finite point");
}

// Row j holds psi_k(x_j / sqrt h), k = 0..N.
struct AxisTables {
  int stride;
  std::vector<double> vals;
  std::vector<double> ders;
  AxisTables(const ModelParams& params, const Vec& x, bool with_derivs)
      : stride(params.level() + 1),
        vals(static_cast<std::size_t>(params.dim()) * stride),
        ders(with_derivs ? vals.size() : 0) {
    const double sqrt_h = std::sqrt(params.h());
    for (int j = 0; j < params.dim(); ++j) {
      std::span<double> v(vals.data() + j * stride, stride);
      std::span<double> dv;
      if (with_derivs) dv = std::span<double>(ders.data() + j * stride, stride);
      hermite_values(x[j] / sqrt_h, v, dv);
    }
  }
  double v(int axis, int k) const { return vals[axis * stride + k]; }
  double dv(int axis, int k) const { return ders[axis * stride + k]; }
};

#ifdef HNODAL_HAVE_FLOAT128
#pragma GCC diagnostic push
#pragma GCC diagnostic ignored "-Wpedantic"
using quad = __float128;

struct QuadComplex {
  __complex128 z;
  QuadComplex(quad re = 0, quad im = 0) {
    __real__ z = re;
    __imag__ z = im;
  }
  static QuadComplex wrap(__complex128 w) {
    QuadComplex q;
    q.z = w;
    return q;
  }
  quad real() const { return __real__ z; }
  quad imag() const { return __imag__ z; }
  friend QuadComplex operator+(QuadComplex a, QuadComplex b) { return wrap(a.z + b.z); }
  friend QuadComplex operator-(QuadComplex a, QuadComplex b) { return wrap(a.z - b.z); }
  friend QuadComplex operator*(QuadComplex a, QuadComplex b) { return wrap(a.z * b.z); }
  friend QuadComplex operator/(QuadComplex a, QuadComplex b) { return wrap(a.z / b.z); }
};
quad pi_quad() { return acosq(quad(-1)); }
#pragma GCC diagnostic pop

quad real_log(quad x) { return logq(x); }
quad real_sqrt(quad x) { return sqrtq(x); }
quad real_exp(quad x) { return expq(x); }
quad abs(quad x) { return fabsq(x); }
quad abs(QuadComplex a) { return cabsq(a.z); }
quad arg(QuadComplex a) { return cargq(a.z); }
QuadComplex sin(QuadComplex a) { return QuadComplex::wrap(csinq(a.z)); }
QuadComplex cos(QuadComplex a) { return QuadComplex::wrap(ccosq(a.z)); }
QuadComplex exp(QuadComplex a) { return QuadComplex::wrap(cexpq(a.z)); }
#endif

double real_log(double x) { return std::log(x); }

template <class R>
R pi_value() {
#ifdef HNODAL_HAVE_FLOAT128
  if constexpr (std::is_same_v<R, quad>) return pi_quad();
#endif
  return kPi;
}

template <class R>
double unit_roundoff() {
#ifdef HNODAL_HAVE_FLOAT128
  if constexpr (std::is_same_v<R, quad>) return std::ldexp(1.0, -113);
#endif
  return std::ldexp(1.0, -53);
}

Arithmetic checked_format(Arithmetic a) {
  if (a == Arithmetic::binary128 && !binary128_available())
    throw DomainError("binary128 arithmetic not available in this build");
  return a;
}

// psi_k(xi), k = 0..N, by the plain normalized recurrence; the binary128
// exponent range makes the log-scaled form unnecessary here.
template <class R>
std::vector<R> hermite_plain(R xi, int N) {
  std::vector<R> v(N + 1);
  v[0] = real_exp(-xi * xi / 2) / real_sqrt(real_sqrt(pi_value<R>()));
  if (N >= 1) v[1] = real_sqrt(R(2)) * xi * v[0];
  for (int k = 1; k < N; ++k)
    v[k + 1] = real_sqrt(R(2) / R(k + 1)) * xi * v[k] - real_sqrt(R(k) / R(k + 1)) * v[k - 1];
  return v;
}

struct SumResult {
  double value;
  double roundoff;
};

template <class R>
SumResult offdiag_sum_plain(const ModelParams& params, const MultiIndexSet& indices, const Vec& x,
                            const Vec& y) {
  const int d = params.dim();
  const int N = params.level();
  const R sqrt_h = real_sqrt(R(params.h()));
  std::vector<std::vector<R>> tx(d), ty(d);
  for (int j = 0; j < d; ++j) {
    tx[j] = hermite_plain<R>(R(x[j]) / sqrt_h, N);
    ty[j] = hermite_plain<R>(R(y[j]) / sqrt_h, N);
  }
  R acc = 0, mag = 0;
  for (std::size_t a = 0; a < indices.size(); ++a) {
    R prod = 1;
    for (int j = 0; j < d; ++j) prod *= tx[j][indices[a][j]] * ty[j][indices[a][j]];
    acc += prod;
    mag += abs(prod);
  }
  const R scale = R(1) / (sqrt_h * sqrt_h);
  R norm = 1;
  for (int j = 0; j < d; ++j) norm *= real_sqrt(scale);
  return {static_cast<double>(norm * acc),
          unit_roundoff<R>() * (2 * N + 2 * d + 2) * static_cast<double>(norm * mag)};
}

}  // namespace

bool binary128_available() {
#ifdef HNODAL_HAVE_FLOAT128
  return true;
#else
  return false;
#endif
}

KernelJet kernel_jet_exact(const ModelParams& params, const MultiIndexSet& indices, const Vec& x) {
  check_point(params, x, "kernel_jet_exact");
  const int d = params.dim();
  const double h = params.h();
  const AxisTables tab(params, x, true);
  // phi_alpha = h^{-d/4} prod psi, d/dx_j phi_alpha = h^{-d/4 - 1/2} psi'_j prod_{i != j} psi.
  const double norm2 = std::pow(h, -0.5 * d);

  CompensatedSum pi;
  std::vector<CompensatedSum> grad(d), hess(static_cast<std::size_t>(d) * d);
  std::vector<double> prefix(d + 1), suffix(d + 1), dphi(d);
  for (std::size_t a = 0; a < indices.size(); ++a) {
    const auto alpha = indices[a];
    prefix[0] = 1.0;
    for (int j = 0; j < d; ++j) prefix[j + 1] = prefix[j] * tab.v(j, alpha[j]);
    suffix[d] = 1.0;
    for (int j = d - 1; j >= 0; --j) suffix[j] = suffix[j + 1] * tab.v(j, alpha[j]);
    const double phi = prefix[d];
    for (int j = 0; j < d; ++j) dphi[j] = prefix[j] * tab.dv(j, alpha[j]) * suffix[j + 1];
    pi += phi * phi;
    for (int j = 0; j < d; ++j) {
      grad[j] += dphi[j] * phi;
      for (int k = j; k < d; ++k) hess[j * d + k] += dphi[j] * dphi[k];
    }
  }

  KernelJet jet;
  jet.x = x;
  jet.pi = norm2 * pi.value();
  jet.grad.resize(d);
  jet.hess.resize(d, d);
  for (int j = 0; j < d; ++j) {
    jet.grad[j] = norm2 * grad[j].value() / std::sqrt(h);
    for (int k = j; k < d; ++k) {
      jet.hess(j, k) = norm2 * hess[j * d + k].value() / h;
      jet.hess(k, j) = jet.hess(j, k);
    }
  }
  return jet;
}

KernelJet kernel_jet_exact(const ModelParams& params, const Vec& x, std::size_t capacity) {
  const MultiIndexSet indices = enumerate_level(params.dim(), params.level(), capacity);
  return kernel_jet_exact(params, indices, x);
}

double kernel_offdiag_exact(const ModelParams& params, const Vec& x, const Vec& y,
                            std::size_t capacity, Arithmetic arithmetic) {
  check_point(params, x, "kernel_offdiag_exact");
  check_point(params, y, "kernel_offdiag_exact");
  const MultiIndexSet indices = enumerate_level(params.dim(), params.level(), capacity);
  checked_format(arithmetic);
#ifdef HNODAL_HAVE_FLOAT128
  if (arithmetic == Arithmetic::binary128)
    return offdiag_sum_plain<quad>(params, indices, x, y).value;
#endif
  const int d = params.dim();
  const AxisTables tx(params, x, false);
  const AxisTables ty(params, y, false);
  CompensatedSum acc;
  double mag = 0.0;
  for (std::size_t a = 0; a < indices.size(); ++a) {
    // Pair the factors axis by axis so the product is symmetric in (x, y).
    double prod = 1.0;
    for (int j = 0; j < d; ++j) prod *= tx.v(j, indices[a][j]) * ty.v(j, indices[a][j]);
    acc += prod;
    mag += std::abs(prod);
  }
  const double norm = std::pow(params.h(), -0.5 * d);
  const double value = norm * acc.value();
#ifdef HNODAL_HAVE_FLOAT128
  const double roundoff =
      unit_roundoff<double>() * (2 * params.level() + 2 * d + 2) * norm * mag;
  if (arithmetic == Arithmetic::automatic && roundoff > kRoundoffTarget * std::abs(value))
    return offdiag_sum_plain<quad>(params, indices, x, y).value;
#endif
  return value;
}

// ---------------------------------------------------------------------------
// Mehler contour quadrature

void MehlerQuadratureSpec::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    throw DomainError("Mehler quadrature: epsilon must be finite and > 0");
  if (nodes < 4) throw DomainError("Mehler quadrature: need at least 4 nodes");
}

MehlerQuadratureSpec MehlerQuadratureSpec::defaults(const ModelParams& params, const Vec& x,
                                                   const Vec& y) {
  const double E = params.energy();
  const double scaled = 4.0 / (params.level() + 0.5 * params.dim());
  MehlerQuadratureSpec spec;
  spec.nodes = std::max(256, 16 * params.level());
  const double r2 = 0.5 * (x.squaredNorm() + y.squaredNorm());
  if (r2 > 2.0 * E) {
    const double beta = 2.0 * std::acosh(std::sqrt(r2 / (2.0 * E)));
    spec.epsilon = std::max(beta, std::min(1.0, scaled));
  } else {
    spec.epsilon = std::min(1.0, scaled);
  }
  return spec;
}

namespace {

// log G_s(x), G_s(x) = sum_alpha e^{-s|alpha|} phi_alpha(x)^2
//   = e^{s d/2} (2 pi h sinh s)^{-d/2} exp(-|x|^2 tanh(s/2) / h).
double log_heat_diag(const ModelParams& params, double x2, double s) {
  const double d = params.dim();
  const double h = params.h();
  return 0.5 * s * d - 0.5 * d * std::log(2.0 * kPi * h * std::sinh(s)) - x2 * std::tanh(0.5 * s) / h;
}

double log_add(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

// Returns (Re, Im) of (1/M) sum_k U(t_k - i eps) e^{i (t_k - i eps) E / h}.
struct ContourSum {
  double re, im, roundoff;
};

template <class R, class C>
ContourSum mehler_sum(double h_, double nu_, double d_, double eps_, int M,
                                     double xy2_, double xdoty_) {
  // nu = E / h = N + d/2 exactly; a rounded E / h leaks lower levels through
  // the non-integer frequency, amplified by e^{epsilon nu}.
  const R h = h_, nu = nu_, d = d_, eps = eps_, xy2 = xy2_, xdoty = xdoty_;
  const R pi = pi_value<R>();
  const C iu(R(0), R(1));
  const R log_pref = -d / 2 * real_log(2 * pi * h);
  // ln(i sin tau) is continued continuously from t = 0, where i sin(-i eps) =
  // sinh(eps) > 0. Nodes sit at midpoints t_k = -pi + (k + 1/2) 2pi/M, walked
  // outward from the centre so each step unwraps the argument against its
  // neighbour.
  auto node_t = [&](int k) { return -pi + (R(k) + R(0.5)) * (2 * pi / R(M)); };
  std::vector<C> terms(M);
  std::vector<double> weights(M);
  auto eval = [&](int k, R& prev_arg) {
    const C tau(node_t(k), -eps);
    const C s = sin(tau);
    const C c = cos(tau);
    const C isin = iu * s;
    R a = arg(isin);
    while (a - prev_arg > pi) a -= 2 * pi;
    while (a - prev_arg < -pi) a += 2 * pi;
    prev_arg = a;
    const C log_isin(real_log(abs(isin)), a);
    const C phase = (C(xy2) * c / s - C(xdoty) / s) / C(h) + tau * C(nu);
    const C log_term = C(log_pref) - C(d / 2) * log_isin + iu * phase;
    terms[k] = exp(log_term);
    weights[k] = static_cast<double>(abs(log_term)) + 4.0;
  };
  const int right = M / 2;  // first node with t > 0
  R arg_up = 0;
  for (int k = right; k < M; ++k) eval(k, arg_up);
  R arg_down = 0;
  for (int k = right - 1; k >= 0; --k) eval(k, arg_down);

  double mag = 0.0;
  for (int k = 0; k < M; ++k) mag += static_cast<double>(abs(terms[k])) * weights[k];
  const double roundoff = unit_roundoff<R>() * mag / M;
  if constexpr (std::is_same_v<R, double>) {
    CompensatedSum re, im;
    for (const C& z : terms) {
      re += z.real();
      im += z.imag();
    }
    return {re.value() / M, im.value() / M, roundoff};
  } else {
    R re = 0, im = 0;
    for (const C& z : terms) {
      re += z.real();
      im += z.imag();
    }
    return {static_cast<double>(re / R(M)), static_cast<double>(im / R(M)), roundoff};
  }
}

}  // namespace

double mehler_alias_bound(const ModelParams& params, const Vec& x, const Vec& y,
                          const MehlerQuadratureSpec& spec) {
  spec.validate();
  const int N = params.level();
  const double eps = spec.epsilon;
  const double M = spec.nodes;
  const double x2 = x.squaredNorm();
  const double y2 = y.squaredNorm();
  // |Pi_n(x,y)| <= sqrt(Pi_n(x,x) Pi_n(y,y)) <= e^{s n} sqrt(G_s(x) G_s(y)).
  auto log_level_bound = [&](double n, double s) {
    return s * n + 0.5 * (log_heat_diag(params, x2, s) + log_heat_diag(params, y2, s));
  };
  constexpr int kGrid = 400;
  const double neg_inf = -std::numeric_limits<double>::infinity();

  // Levels N + kM, k >= 1, each weighted by e^{-eps k M}: for s < eps the sum is
  // e^{sN} sqrt(G G) q / (1 - q) with q = e^{-(eps - s) M}.
  double best_pos = std::numeric_limits<double>::infinity();
  for (int i = 1; i < kGrid; ++i) {
    const double s = eps * i / kGrid;
    const double log_q = -(eps - s) * M;
    const double log_tail = log_q - std::log(-std::expm1(log_q));
    best_pos = std::min(best_pos, log_level_bound(N, s) + log_tail);
  }

  // Levels N - kM >= 0 are amplified by e^{+eps k M}.
  double log_neg = neg_inf;
  for (int k = 1; N - k * M >= 0; ++k) {
    const double n = N - k * M;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= kGrid; ++i) {
      const double s = 8.0 * i / kGrid;
      best = std::min(best, log_level_bound(n, s));
    }
    log_neg = log_add(log_neg, eps * k * M + best);
  }
  return std::exp(log_add(best_pos, log_neg));
}

MehlerResult kernel_mehler_quadrature(const ModelParams& params, const Vec& x, const Vec& y,
                                      const MehlerQuadratureSpec& spec, double tolerance) {
  spec.validate();
  check_point(params, x, "kernel_mehler_quadrature");
  check_point(params, y, "kernel_mehler_quadrature");
  const double h = params.h();
  const double E = params.energy();
  const double d = params.dim();
  const double eps = spec.epsilon;
  if (eps * E / h > 700.0)
    throw RangeError("Mehler quadrature: e^{epsilon E / h} overflows (epsilon E / h = " +
                     std::to_string(eps * E / h) + ")");

  const double xy2 = 0.5 * (x.squaredNorm() + y.squaredNorm());
  const double xdoty = x.dot(y);
  const double nu = params.level() + 0.5 * d;
  const Arithmetic requested = checked_format(spec.arithmetic);
  ContourSum sum{};
  Arithmetic used = Arithmetic::binary64;
  if (requested != Arithmetic::binary128)
    sum = mehler_sum<double, cplx>(h, nu, d, eps, spec.nodes, xy2, xdoty);
#ifdef HNODAL_HAVE_FLOAT128
  if (requested == Arithmetic::binary128 ||
      (requested == Arithmetic::automatic && sum.roundoff > kRoundoffTarget * std::abs(sum.re))) {
    sum = mehler_sum<quad, QuadComplex>(h, nu, d, eps, spec.nodes, xy2, xdoty);
    used = Arithmetic::binary128;
  }
#endif
  MehlerResult out;
  out.value = sum.re;
  out.imag = sum.im;
  out.spec = spec;
  out.used = used;
  out.roundoff_estimate = sum.roundoff;
  out.alias_bound = mehler_alias_bound(params, x, y, spec);
  if (!(out.alias_bound <= tolerance * std::abs(out.value))) {
    throw AccuracyError("Mehler quadrature: alias bound " + std::to_string(out.alias_bound) +
                            " exceeds tolerance " + std::to_string(tolerance) +
                            " relative to |value| = " + std::to_string(std::abs(out.value)) +
                            "; increase nodes or epsilon",
                        out.alias_bound);
  }
  return out;
}

MehlerResult kernel_mehler_quadrature(const ModelParams& params, const Vec& x, const Vec& y,
                                      double tolerance) {
  return kernel_mehler_quadrature(params, x, y, MehlerQuadratureSpec::defaults(params, x, y),
                                  tolerance);
}

}  // namespace hnodal
