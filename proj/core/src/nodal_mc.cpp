#include "hnodal/nodal_mc.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "hnodal/asymptotics.hpp"
#include "hnodal/errors.hpp"
#include "hnodal/hermite.hpp"
#include "hnodal/rng.hpp"
#include "hnodal/summation.hpp"

namespace hnodal {

namespace {

constexpr double kPi = std::numbers::pi;

int sign_of_phi(const ModelParams& params, double x) {
  return hermite_signed_log(x / std::sqrt(params.h()), params.level()).sign;
}

// Length of segment AB inside the disc |p - c| <= r.
double clipped_length(double ax, double ay, double bx, double by, double cx, double cy, double r) {
  const double dx = bx - ax, dy = by - ay;
  const double len2 = dx * dx + dy * dy;
  if (len2 == 0.0) return 0.0;
  const double fx = ax - cx, fy = ay - cy;
  // |f + s d|^2 = r^2
  const double b = fx * dx + fy * dy;
  const double c = fx * fx + fy * fy - r * r;
  const double disc = b * b - len2 * c;
  if (disc <= 0.0) return 0.0;
  const double root = std::sqrt(disc);
  const double s0 = std::max(0.0, (-b - root) / len2);
  const double s1 = std::min(1.0, (-b + root) / len2);
  if (s1 <= s0) return 0.0;
  return std::sqrt(len2) * (s1 - s0);
}

}  // namespace

ZeroCount count_zeros_1d(const ModelParams& params, double a, double b, int resolution) {
  if (params.dim() != 1) throw DomainError("count_zeros_1d requires d = 1");
  if (!(b > a) || !std::isfinite(a) || !std::isfinite(b))
    throw DomainError("count_zeros_1d: need a finite interval with a < b");
  const double max_spacing = kPi * params.h() / (8.0 * params.caustic_radius());
  if (resolution <= 0) resolution = static_cast<int>(std::ceil((b - a) / max_spacing)) + 1;
  if (resolution < 2) resolution = 2;
  const double spacing = (b - a) / (resolution - 1);
  if (spacing > max_spacing) {
    throw AccuracyError("count_zeros_1d: sample spacing " + std::to_string(spacing) +
                            " exceeds pi h / (8 sqrt(2E)) = " + std::to_string(max_spacing),
                        spacing);
  }

  ZeroCount out;
  auto bisect = [&](double lo, double hi, int sign_lo) {
    while (hi - lo > 1e-12) {
      const double mid = 0.5 * (lo + hi);
      const int s = sign_of_phi(params, mid);
      if (s == 0) return mid;
      if (s == sign_lo) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  };
  double x_prev = a;
  int s_prev = sign_of_phi(params, a);
  if (s_prev == 0) out.zeros.push_back(a);
  for (int i = 1; i < resolution; ++i) {
    const double x = (i == resolution - 1) ? b : a + i * spacing;
    const int s = sign_of_phi(params, x);
    if (s == 0) {
      out.zeros.push_back(x);
    } else if (s_prev != 0 && s != s_prev) {
      out.zeros.push_back(bisect(x_prev, x, s_prev));
    }
    x_prev = x;
    s_prev = s;
  }
  out.count = static_cast<int>(out.zeros.size());
  return out;
}

double nodal_length_2d(const LatticeField2D& field, const Ball& ball) {
  if (ball.center.size() != 2) throw DomainError("nodal_length_2d requires a 2D ball");
  const double s = field.spacing;
  const double cx = ball.center[0], cy = ball.center[1], r = ball.radius;
  const double x_hi = field.x(field.nx - 1), y_hi = field.y(field.ny - 1);
  const double margin = 2.0 * s * (1.0 - 1e-9);
  if (cx - r < field.x0 + margin || cx + r > x_hi - margin || cy - r < field.y0 + margin ||
      cy + r > y_hi - margin) {
    throw DomainError("nodal_length_2d: lattice does not cover the ball with a two-cell margin");
  }
  for (double v : field.values)
    if (!std::isfinite(v)) throw DomainError("nodal_length_2d: non-finite field value");

  const int i0 = std::max(0, static_cast<int>(std::floor((cx - r - field.x0) / s)) - 1);
  const int i1 = std::min(field.nx - 2, static_cast<int>(std::ceil((cx + r - field.x0) / s)) + 1);
  const int j0 = std::max(0, static_cast<int>(std::floor((cy - r - field.y0) / s)) - 1);
  const int j1 = std::min(field.ny - 2, static_cast<int>(std::ceil((cy + r - field.y0) / s)) + 1);

  CompensatedSum total;
  for (int j = j0; j <= j1; ++j) {
    for (int i = i0; i <= i1; ++i) {
      // Corners counter-clockwise from (i, j).
      const std::array<double, 4> f = {field.at(i, j), field.at(i + 1, j), field.at(i + 1, j + 1),
                                       field.at(i, j + 1)};
      const std::array<double, 4> px = {field.x(i), field.x(i + 1), field.x(i + 1), field.x(i)};
      const std::array<double, 4> py = {field.y(j), field.y(j), field.y(j + 1), field.y(j + 1)};
      std::array<bool, 4> pos{};
      for (int k = 0; k < 4; ++k) pos[k] = f[k] >= 0.0;
      // Edge k joins corner k and corner k+1.
      std::array<double, 4> ex{}, ey{};
      std::array<bool, 4> cut{};
      int n_cut = 0;
      for (int k = 0; k < 4; ++k) {
        const int k1 = (k + 1) % 4;
        if (pos[k] == pos[k1]) continue;
        const double t = f[k] / (f[k] - f[k1]);
        ex[k] = px[k] + t * (px[k1] - px[k]);
        ey[k] = py[k] + t * (py[k1] - py[k]);
        cut[k] = true;
        ++n_cut;
      }
      if (n_cut == 0) continue;
      auto seg = [&](int e0, int e1) {
        total += clipped_length(ex[e0], ey[e0], ex[e1], ey[e1], cx, cy, r);
      };
      if (n_cut == 2) {
        int e0 = -1, e1 = -1;
        for (int k = 0; k < 4; ++k) {
          if (!cut[k]) continue;
          (e0 < 0 ? e0 : e1) = k;
        }
        seg(e0, e1);
        continue;
      }
      // Saddle: corners 0,2 share a sign opposite to corners 1,3.
      const bool center_pos = 0.25 * (f[0] + f[1] + f[2] + f[3]) >= 0.0;
      if (center_pos == pos[0]) {
        // Corners 0 and 2 connect through the centre; cut off corners 1 and 3.
        seg(0, 1);
        seg(2, 3);
      } else {
        seg(3, 0);
        seg(1, 2);
      }
    }
  }
  return total.value();
}

NodalEstimate mc_expected_measure(const ModelParams& params, const Ball& ball, int n_samples,
                                  std::uint64_t base_seed, double grid_spacing) {
  if (params.dim() != 2) throw DomainError("mc_expected_measure requires d = 2");
  if (ball.center.size() != 2) throw DomainError("mc_expected_measure: ball must be 2D");
  if (n_samples < 1) throw DomainError("mc_expected_measure: need at least one sample");
  const double h = params.h();
  if (grid_spacing <= 0.0) grid_spacing = kDefaultSpacingFraction * h;
  if (grid_spacing > h / 5.0 * (1.0 + 1e-12)) {
    throw AccuracyError("mc_expected_measure: grid spacing " + std::to_string(grid_spacing) +
                            " is coarser than h/5 = " + std::to_string(h / 5.0),
                        grid_spacing);
  }
  const double s = grid_spacing;
  const int cells = static_cast<int>(std::ceil(2.0 * ball.radius / s)) + 6;
  const double x0 = ball.center[0] - 0.5 * cells * s;
  const double y0 = ball.center[1] - 0.5 * cells * s;
  const auto indices = std::make_shared<const MultiIndexSet>(enumerate_level(2, params.level()));

  std::vector<double> lengths(n_samples);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n_samples; ++i) {
    const std::uint64_t seed = derive_seed(base_seed, static_cast<std::uint64_t>(i));
    RandomEigenfunction f{params, indices, std::vector<double>(indices->size()), seed};
    for (std::size_t a = 0; a < f.coeffs.size(); ++a)
      f.coeffs[a] = standard_normal(seed, Stream::Coefficients, a);
    const LatticeField2D field = evaluate_lattice_2d(f, x0, y0, s, cells + 1, cells + 1);
    lengths[i] = nodal_length_2d(field, ball);
  }

  NodalEstimate est;
  est.ball = ball;
  est.n_samples = n_samples;
  est.grid_spacing = s;
  est.base_seed = base_seed;
  est.mean = pairwise_sum(lengths) / n_samples;
  if (n_samples > 1) {
    std::vector<double> dev(n_samples);
    for (int i = 0; i < n_samples; ++i) dev[i] = (lengths[i] - est.mean) * (lengths[i] - est.mean);
    const double var = pairwise_sum(dev) / (n_samples - 1);
    est.std_error = std::sqrt(var / n_samples);
  }
  return est;
}

double density_leading(const ModelParams& params, const Vec& x) {
  const double gap = x.squaredNorm() - 2.0 * params.energy();
  if (gap < 0.0) {
    if (x.squaredNorm() == 0.0) return allowed_density_constant(params.dim()) *
                                       std::sqrt(2.0 * params.energy()) / params.h();
    return density_allowed_leading(params, x);
  }
  if (gap > 0.0) return density_forbidden_leading(params, x);
  return 0.0;
}

double weyl_integral_1d(const ModelParams& params, double a, double b) {
  // int sqrt(R^2 - x^2) dx = (x sqrt(R^2 - x^2) + R^2 asin(x/R)) / 2
  const double R = params.caustic_radius();
  const double lo = std::clamp(a, -R, R);
  const double hi = std::clamp(b, -R, R);
  if (hi <= lo) return 0.0;
  auto prim = [R](double x) {
    return 0.5 * (x * std::sqrt(std::max(0.0, R * R - x * x)) + R * R * std::asin(x / R));
  };
  return allowed_density_constant(1) * (prim(hi) - prim(lo)) / params.h();
}

ComparisonReport compare_report(const ModelParams& params, const Ball& ball, int n_samples,
                                std::uint64_t base_seed, const CompareOptions& options) {
  ComparisonReport rep;
  rep.d = params.dim();
  rep.energy = params.energy();
  rep.level = params.level();
  rep.h = params.h();
  rep.ball = ball;

  if (params.dim() == 1) {
    // The d = 1 eigenspace is spanned by phi_N alone: the zero set is
    // deterministic and Kac-Rice degenerates (omega = 0).
    rep.route = "weyl_count_1d";
    const double a = ball.center[0] - ball.radius;
    const double b = ball.center[0] + ball.radius;
    const ZeroCount zc = count_zeros_1d(params, a, b);
    rep.mc.ball = ball;
    rep.mc.n_samples = 1;
    rep.mc.mean = zc.count;
    rep.mc.std_error = 0.0;
    rep.mc.base_seed = base_seed;
    rep.asymptotic = weyl_integral_1d(params, a, b);
    rep.relative_gaps = {rep.asymptotic > 0.0 ? (rep.mc.mean - rep.asymptotic) / rep.asymptotic : 0.0,
                         0.0};
    return rep;
  }
  if (params.dim() != 2)
    throw DomainError("compare_report: Monte-Carlo nodal measurement is implemented for d = 2 only");

  rep.route = "kac_rice_mc";
  rep.mc = mc_expected_measure(params, ball, n_samples, base_seed, options.grid_spacing);
  const BallIntegral exact = density_integral_ball(params, ball, options.quad_order, options.exclusions);
  rep.kacrice_exact = exact.value;
  rep.kacrice_error = exact.error_estimate;
  rep.asymptotic = integrate_over_ball(ball, options.quad_order,
                                       [&](const Vec& x) { return density_leading(params, x); });
  if (rep.mc.std_error > 0.0) rep.z_score = (rep.mc.mean - exact.value) / rep.mc.std_error;
  rep.relative_gaps = {(rep.mc.mean - exact.value) / exact.value,
                       (exact.value - rep.asymptotic) / rep.asymptotic};
  return rep;
}

// ---------------------------------------------------------------------------
// JSON

void to_json(nlohmann::json& j, const NodalEstimate& e) {
  j = nlohmann::json{{"ball", e.ball},           {"n_samples", e.n_samples},
                     {"mean", e.mean},           {"stderr", e.std_error},
                     {"grid_spacing", e.grid_spacing}, {"base_seed", e.base_seed}};
}

void from_json(const nlohmann::json& j, NodalEstimate& e) {
  e.ball = j.at("ball").get<Ball>();
  e.n_samples = j.at("n_samples").get<int>();
  e.mean = j.at("mean").get<double>();
  e.std_error = j.at("stderr").get<double>();
  e.grid_spacing = j.at("grid_spacing").get<double>();
  e.base_seed = j.at("base_seed").get<std::uint64_t>();
}

namespace {
nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}
std::optional<double> optional_from(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}
}  // namespace

void to_json(nlohmann::json& j, const ComparisonReport& r) {
  j = nlohmann::json{
      {"route", r.route},
      {"params", {{"d", r.d}, {"E", r.energy}, {"N", r.level}, {"h", r.h}}},
      {"ball", r.ball},
      {"mc", r.mc},
      {"kacrice_exact", optional_json(r.kacrice_exact)},
      {"kacrice_error", r.kacrice_error},
      {"asymptotic", r.asymptotic},
      {"z_score", optional_json(r.z_score)},
      {"relative_gaps", {r.relative_gaps.first, r.relative_gaps.second}},
  };
}

void from_json(const nlohmann::json& j, ComparisonReport& r) {
  r.route = j.at("route").get<std::string>();
  const auto& p = j.at("params");
  r.d = p.at("d").get<int>();
  r.energy = p.at("E").get<double>();
  r.level = p.at("N").get<int>();
  r.h = p.at("h").get<double>();
  r.ball = j.at("ball").get<Ball>();
  r.mc = j.at("mc").get<NodalEstimate>();
  r.kacrice_exact = optional_from(j.at("kacrice_exact"));
  r.kacrice_error = j.at("kacrice_error").get<double>();
  r.asymptotic = j.at("asymptotic").get<double>();
  r.z_score = optional_from(j.at("z_score"));
  const auto gaps = j.at("relative_gaps");
  r.relative_gaps = {gaps.at(0).get<double>(), gaps.at(1).get<double>()};
}

}  // namespace hnodal

hnodal::Ball nlohmann::adl_serializer<hnodal::Ball>::from_json(const nlohmann::json& j) {
  const auto c = j.at("center").get<std::vector<double>>();
  return hnodal::Ball(Eigen::Map<const hnodal::Vec>(c.data(), static_cast<Eigen::Index>(c.size())),
                      j.at("radius").get<double>());
}

void nlohmann::adl_serializer<hnodal::Ball>::to_json(nlohmann::json& j, const hnodal::Ball& b) {
  j = nlohmann::json{{"center", std::vector<double>(b.center.data(), b.center.data() + b.center.size())},
                     {"radius", b.radius}};
}
