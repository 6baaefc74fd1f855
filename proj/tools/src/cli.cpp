#include "cli.hpp"

#include <CLI/CLI.hpp>

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "config.hpp"
#include "hnodal/asymptotics.hpp"
#include "hnodal/ensemble.hpp"
#include "hnodal/errors.hpp"
#include "hnodal/kacrice.hpp"
#include "hnodal/nodal_mc.hpp"
#include "hnodal/projector.hpp"
#include "version.hpp"

namespace hnodal::cli {

namespace {

using Cell = std::variant<double, std::int64_t, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

std::string hash_hex(const ExperimentConfig& cfg) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, cfg.hash());
  return buf;
}

nlohmann::json config_json(const ExperimentConfig& cfg) {
  nlohmann::json j = nlohmann::json::object();
  std::istringstream in(cfg.serialize());
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    j[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return j;
}

nlohmann::json provenance(const ExperimentConfig& cfg) {
  return {{"hnodal_version", kVersion}, {"config_hash", hash_hex(cfg)}, {"config", config_json(cfg)}};
}

void csv_header(std::ostream& os, const ExperimentConfig& cfg) {
  os << "# hnodal " << kVersion << "\n# config_hash " << hash_hex(cfg) << "\n";
}

nlohmann::json cell_json(const Cell& c) {
  if (const double* v = std::get_if<double>(&c)) {
    if (!std::isfinite(*v)) return nullptr;
    return *v;
  }
  if (const auto* i = std::get_if<std::int64_t>(&c)) return *i;
  return std::get<std::string>(c);
}

std::string cell_csv(const Cell& c) {
  if (const double* v = std::get_if<double>(&c)) return format_double(*v);
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

void write_table(std::ostream& os, const ExperimentConfig& cfg, const Table& t) {
  if (cfg.format == "json") {
    nlohmann::json j = provenance(cfg);
    j["command"] = cfg.command;
    j["columns"] = t.columns;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : t.rows) {
      nlohmann::json row = nlohmann::json::object();
      for (std::size_t k = 0; k < r.size(); ++k) row[t.columns[k]] = cell_json(r[k]);
      rows.push_back(row);
    }
    j["rows"] = rows;
    os << j.dump(2) << "\n";
    return;
  }
  csv_header(os, cfg);
  for (std::size_t k = 0; k < t.columns.size(); ++k) os << (k ? "," : "") << t.columns[k];
  os << "\n";
  for (const auto& r : t.rows) {
    for (std::size_t k = 0; k < r.size(); ++k) os << (k ? "," : "") << cell_csv(r[k]);
    os << "\n";
  }
}

// Writes to cfg.out, or to `fallback` when no path is set.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (path.empty()) {
      os_ = &fallback;
    } else {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw ConfigError("cannot open output '" + path + "'");
      os_ = file_.get();
    }
  }
  std::ostream& stream() { return *os_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* os_;
};

Vec to_vec(const std::vector<double>& v) {
  Vec x(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) x[static_cast<Eigen::Index>(i)] = v[i];
  return x;
}

Vec on_axis(int d, double r) {
  Vec x = Vec::Zero(d);
  x[0] = r;
  return x;
}

RegionThresholds thresholds(const ExperimentConfig& cfg) {
  return {cfg.origin_factor, cfg.caustic_kappa};
}

// Origin points always fail; caustic-band points only with reject_caustic.
RegionTag admit(const ModelParams& p, const Vec& x, const ExperimentConfig& cfg) {
  const RegionTag tag = classify_region(p, x, thresholds(cfg));
  if (tag == RegionTag::Origin)
    throw DomainError("origin exclusion: |x| = " + format_double(x.norm()) + " < origin_factor * h = " +
                      format_double(cfg.origin_factor * p.h()));
  if (tag == RegionTag::CausticBand && cfg.reject_caustic)
    throw DomainError("caustic exclusion: ||x|^2 - 2E| = " +
                      format_double(std::abs(x.squaredNorm() - 2 * p.energy())) +
                      " < caustic_kappa * h^(2/3) = " +
                      format_double(cfg.caustic_kappa * std::cbrt(p.h() * p.h())));
  return tag;
}

std::vector<Vec> density_points(const ExperimentConfig& cfg) {
  std::vector<Vec> pts;
  for (const auto& p : cfg.points) pts.push_back(to_vec(p));
  for (double r : cfg.radii.values()) pts.push_back(on_axis(cfg.d, r));
  if (pts.empty()) throw ConfigError("density needs --points or --radii");
  return pts;
}

Table cmd_density(const ExperimentConfig& cfg) {
  const ModelParams p(cfg.d, cfg.E, cfg.N);
  const MultiIndexSet indices = enumerate_level(p.dim(), p.level());
  Table t;
  for (int j = 0; j < cfg.d; ++j) t.columns.push_back("x_" + std::to_string(j + 1));
  for (const char* c : {"r", "region", "F_exact", "F_leading", "ratio"}) t.columns.push_back(c);
  for (const Vec& x : density_points(cfg)) {
    const RegionTag tag = admit(p, x, cfg);
    const double exact = density(p, indices, x);
    const double lead = density_leading(p, x);
    std::vector<Cell> row;
    for (int j = 0; j < cfg.d; ++j) row.emplace_back(x[j]);
    row.emplace_back(x.norm());
    row.emplace_back(std::string(to_string(tag)));
    row.emplace_back(exact);
    row.emplace_back(lead);
    row.emplace_back(exact / lead);
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string to_string(Arithmetic a) {
  return a == Arithmetic::binary128 ? "binary128" : "binary64";
}

Table cmd_kernel(const ExperimentConfig& cfg) {
  const ModelParams p(cfg.d, cfg.E, cfg.N);
  if (cfg.points.empty()) throw ConfigError("kernel needs --points");
  if (!cfg.y_points.empty() && cfg.y_points.size() != 1 && cfg.y_points.size() != cfg.points.size())
    throw ConfigError("--y-points must hold one point or as many as --points");
  Table t;
  auto coords = [&](const char* name) {
    for (int j = 0; j < cfg.d; ++j) t.columns.push_back(std::string(name) + "_" + std::to_string(j + 1));
  };
  coords("x");
  if (cfg.jet) {
    t.columns.push_back("pi");
    for (int j = 0; j < cfg.d; ++j) t.columns.push_back("grad_" + std::to_string(j + 1));
    for (int j = 0; j < cfg.d; ++j)
      for (int k = j; k < cfg.d; ++k)
        t.columns.push_back("hess_" + std::to_string(j + 1) + std::to_string(k + 1));
    const MultiIndexSet indices = enumerate_level(p.dim(), p.level());
    for (const auto& xp : cfg.points) {
      const KernelJet jet = kernel_jet_exact(p, indices, to_vec(xp));
      std::vector<Cell> row(xp.begin(), xp.end());
      row.emplace_back(jet.pi);
      for (int j = 0; j < cfg.d; ++j) row.emplace_back(jet.grad[j]);
      for (int j = 0; j < cfg.d; ++j)
        for (int k = j; k < cfg.d; ++k) row.emplace_back(jet.hess(j, k));
      t.rows.push_back(std::move(row));
    }
    return t;
  }
  coords("y");
  const bool want_exact = cfg.method != "mehler";
  const bool want_mehler = cfg.method != "exact";
  if (want_exact) t.columns.push_back("exact");
  if (want_mehler)
    for (const char* c : {"mehler", "imag", "alias_bound", "epsilon", "nodes", "arithmetic"})
      t.columns.push_back(c);
  if (want_exact && want_mehler) t.columns.push_back("residual");
  for (std::size_t i = 0; i < cfg.points.size(); ++i) {
    const Vec x = to_vec(cfg.points[i]);
    const Vec y = cfg.y_points.empty()       ? x
                  : cfg.y_points.size() == 1 ? to_vec(cfg.y_points[0])
                                             : to_vec(cfg.y_points[i]);
    std::vector<Cell> row;
    for (int j = 0; j < cfg.d; ++j) row.emplace_back(x[j]);
    for (int j = 0; j < cfg.d; ++j) row.emplace_back(y[j]);
    double exact = 0;
    if (want_exact) {
      exact = kernel_offdiag_exact(p, x, y);
      row.emplace_back(exact);
    }
    if (want_mehler) {
      MehlerQuadratureSpec spec = MehlerQuadratureSpec::defaults(p, x, y);
      if (cfg.epsilon > 0) spec.epsilon = cfg.epsilon;
      if (cfg.nodes > 0) spec.nodes = cfg.nodes;
      const MehlerResult m = kernel_mehler_quadrature(p, x, y, spec, cfg.alias_tol);
      row.emplace_back(m.value);
      row.emplace_back(m.imag);
      row.emplace_back(m.alias_bound);
      row.emplace_back(m.spec.epsilon);
      row.emplace_back(static_cast<std::int64_t>(m.spec.nodes));
      row.emplace_back(to_string(m.used));
      if (want_exact) row.emplace_back(std::abs(m.value - exact) / std::abs(exact));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

void cmd_sample(const ExperimentConfig& cfg, std::ostream& out) {
  const ModelParams p(cfg.d, cfg.E, cfg.N);
  if (cfg.out.empty()) throw ConfigError("sample needs --out for the coefficient dump");
  const RandomEigenfunction f = sample_eigenfunction(p, cfg.seed);
  {
    std::ofstream dump(cfg.out, std::ios::binary);
    if (!dump) throw ConfigError("cannot open output '" + cfg.out + "'");
    write_coefficients(dump, f);
  }
  out << "# hnodal " << kVersion << " config_hash " << hash_hex(cfg) << "\n"
      << "wrote " << f.coeffs.size() << " coefficients to " << cfg.out << "\n";
  if (cfg.grid == 0) return;
  if (cfg.d != 2) throw DomainError("sample --grid needs d = 2");
  if (cfg.grid < 2) throw ConfigError("--grid needs at least 2 points per side");
  const double spacing = 2 * cfg.extent / (cfg.grid - 1);
  const LatticeField2D lat = evaluate_lattice_2d(f, -cfg.extent, -cfg.extent, spacing, cfg.grid, cfg.grid);
  Sink sink(cfg.grid_out, out);
  std::ostream& os = sink.stream();
  csv_header(os, cfg);
  os << "x,y,value\n";
  for (int j = 0; j < lat.ny; ++j)
    for (int i = 0; i < lat.nx; ++i)
      os << format_double(lat.x(i)) << "," << format_double(lat.y(j)) << "," << format_double(lat.at(i, j))
         << "\n";
}

Ball config_ball(const ExperimentConfig& cfg) {
  return Ball(cfg.center.empty() ? Vec::Zero(cfg.d) : to_vec(cfg.center), cfg.radius);
}

CompareOptions compare_options(const ExperimentConfig& cfg) {
  CompareOptions o;
  o.grid_spacing = cfg.grid_spacing;
  o.quad_order = cfg.quad_order;
  return o;
}

void cmd_mc(const ExperimentConfig& cfg, std::ostream& os) {
  const ModelParams p(cfg.d, cfg.E, cfg.N);
  const ComparisonReport rep = compare_report(p, config_ball(cfg), cfg.samples, cfg.seed, compare_options(cfg));
  if (cfg.format == "json") {
    nlohmann::json j = provenance(cfg);
    j["command"] = cfg.command;
    j["report"] = rep;
    os << j.dump(2) << "\n";
    return;
  }
  Table t;
  t.columns = {"route", "d", "E", "N", "h", "samples", "mean", "stderr", "grid_spacing",
               "kacrice_exact", "kacrice_error", "asymptotic", "z_score", "gap_mc_exact",
               "gap_exact_asymptotic"};
  const double nan = std::nan("");
  t.rows.push_back({rep.route, static_cast<std::int64_t>(rep.d), rep.energy,
                    static_cast<std::int64_t>(rep.level), rep.h,
                    static_cast<std::int64_t>(rep.mc.n_samples), rep.mc.mean, rep.mc.std_error,
                    rep.mc.grid_spacing, rep.kacrice_exact.value_or(nan), rep.kacrice_error,
                    rep.asymptotic, rep.z_score.value_or(nan), rep.relative_gaps.first,
                    rep.relative_gaps.second});
  write_table(os, cfg, t);
}

Table cmd_sweep(const ExperimentConfig& cfg) {
  const std::vector<double> radii = cfg.radii.values();
  if (radii.empty()) throw ConfigError("sweep needs --radii");
  if (cfg.levels.size() < 2) throw ConfigError("sweep needs at least two --levels");
  Table t;
  t.columns = {"r", "N", "h", "region", "F_exact", "F_leading", "ratio", "h_scaled", "fitted_exponent"};
  for (double r : radii) {
    std::vector<std::vector<Cell>> block;
    std::vector<double> lh, lf;
    for (int N : cfg.levels) {
      const ModelParams p(cfg.d, cfg.E, N);
      const Vec x = on_axis(cfg.d, r);
      const RegionTag tag = admit(p, x, cfg);
      const double exact = density(p, x);
      const double lead = density_leading(p, x);
      // h^1 in the allowed region, h^(1/2) in the forbidden one.
      const double power = x.squaredNorm() < 2 * p.energy() ? 1.0 : 0.5;
      lh.push_back(std::log(p.h()));
      lf.push_back(std::log(exact));
      block.push_back({r, static_cast<std::int64_t>(N), p.h(), std::string(to_string(tag)), exact, lead,
                       exact / lead, exact * std::pow(p.h(), power)});
    }
    const double n = static_cast<double>(lh.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lh.size(); ++i) {
      sx += lh[i];
      sy += lf[i];
      sxx += lh[i] * lh[i];
      sxy += lh[i] * lf[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    for (auto& row : block) {
      row.emplace_back(slope);
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

Table cmd_compare(const ExperimentConfig& cfg) {
  if (cfg.levels.empty()) throw ConfigError("compare needs --levels");
  Table t;
  t.columns = {"N", "h", "route", "mean", "stderr", "grid_spacing", "kacrice_exact", "kacrice_error",
               "asymptotic", "z_score", "gap_mc_exact", "gap_exact_asymptotic"};
  const double nan = std::nan("");
  for (int N : cfg.levels) {
    const ModelParams p(cfg.d, cfg.E, N);
    const ComparisonReport rep =
        compare_report(p, config_ball(cfg), cfg.samples, cfg.seed, compare_options(cfg));
    t.rows.push_back({static_cast<std::int64_t>(N), rep.h, rep.route, rep.mc.mean, rep.mc.std_error,
                      rep.mc.grid_spacing, rep.kacrice_exact.value_or(nan), rep.kacrice_error,
                      rep.asymptotic, rep.z_score.value_or(nan), rep.relative_gaps.first,
                      rep.relative_gaps.second});
  }
  return t;
}

void dispatch(const ExperimentConfig& cfg, std::ostream& out) {
  if (cfg.command == "sample") {
    cmd_sample(cfg, out);
    return;
  }
  Sink sink(cfg.out, out);
  std::ostream& os = sink.stream();
  if (cfg.command == "density") {
    write_table(os, cfg, cmd_density(cfg));
  } else if (cfg.command == "kernel") {
    write_table(os, cfg, cmd_kernel(cfg));
  } else if (cfg.command == "mc") {
    cmd_mc(cfg, os);
  } else if (cfg.command == "sweep") {
    write_table(os, cfg, cmd_sweep(cfg));
  } else if (cfg.command == "compare") {
    write_table(os, cfg, cmd_compare(cfg));
  } else {
    throw ConfigError("unknown command '" + cfg.command + "'");
  }
}

struct FlagSpec {
  const char* key;
  const char* help;
  bool is_switch = false;
};

const FlagSpec kFlags[] = {
    {"d", "dimension"},
    {"E", "energy"},
    {"N", "eigenspace level"},
    {"seed", "base seed"},
    {"samples", "Monte-Carlo sample count"},
    {"grid_spacing", "lattice spacing for Monte-Carlo (<= 0: h/6)"},
    {"out", "output path (default stdout)"},
    {"format", "csv or json"},
    {"radii", "radius sweep start:stop:step"},
    {"points", "explicit points, x1,x2;y1,y2;..."},
    {"y_points", "second kernel argument (one point or one per --points)"},
    {"method", "kernel method: exact, mehler or both"},
    {"jet", "kernel: emit the diagonal jet pi, grad, hess", true},
    {"levels", "comma-separated levels for sweep and compare"},
    {"center", "ball centre, comma-separated (default origin)"},
    {"radius", "ball radius"},
    {"epsilon", "Mehler contour offset (<= 0: adaptive)"},
    {"nodes", "Mehler trapezoid nodes (<= 0: adaptive)"},
    {"grid", "sample: lattice points per side (0: none)"},
    {"grid_out", "sample: lattice CSV path (default stdout)"},
    {"extent", "sample: lattice half-width"},
    {"quad_order", "ball quadrature order"},
    {"alias_tol", "Mehler alias tolerance relative to |value|"},
    {"origin_factor", "origin exclusion |x| < origin_factor * h"},
    {"caustic_kappa", "caustic band ||x|^2 - 2E| < caustic_kappa * h^(2/3)"},
    {"reject_caustic", "treat caustic-band points as errors", true},
};

struct Command {
  const char* name;
  const char* description;
};

const Command kCommands[] = {
    {"density",
     "Kac-Rice density at points or along the x_1 axis.\n"
     "Columns: x_1..x_d, r, region, F_exact, F_leading, ratio."},
    {"kernel",
     "Eigenspace kernel Pi(x, y) by the exact sum and/or the Mehler contour.\n"
     "Columns: x_*, y_*, exact, mehler, imag, alias_bound, epsilon, nodes, arithmetic, residual\n"
     "(subset by --method). With --jet: x_*, pi, grad_*, hess_jk."},
    {"sample",
     "Random eigenfunction: binary coefficient dump to --out, optional lattice CSV\n"
     "(columns x, y, value) with --grid."},
    {"mc", "Monte-Carlo nodal measure in a ball against Kac-Rice; emits a comparison report."},
    {"sweep",
     "Density over levels x radii.\n"
     "Columns: r, N, h, region, F_exact, F_leading, ratio, h_scaled, fitted_exponent."},
    {"compare",
     "Comparison report per level.\n"
     "Columns: N, h, route, mean, stderr, grid_spacing, kacrice_exact, kacrice_error,\n"
     "asymptotic, z_score, gap_mc_exact, gap_exact_asymptotic."},
};

std::string flag_name(const char* key) {
  std::string s = key;
  for (char& c : s)
    if (c == '_') c = '-';
  return "--" + s;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nodal sets of random Hermite eigenfunctions", "hnodal"};
  app.set_version_flag("--version", std::string("hnodal ") + kVersion);
  app.require_subcommand(0, 1);

  std::map<std::string, std::string> raw;
  std::map<std::string, CLI::Option*> opts;
  for (const FlagSpec& f : kFlags) {
    if (f.is_switch)
      opts[f.key] = app.add_flag(flag_name(f.key), f.help);
    else
      opts[f.key] = app.add_option(flag_name(f.key), raw[f.key], f.help);
  }
  std::string config_path, save_path;
  app.add_option("--config", config_path, "load key = value settings before applying flags");
  app.add_option("--save-config", save_path, "write the fully resolved config");

  std::vector<CLI::App*> subs;
  for (const Command& c : kCommands) {
    CLI::App* sub = app.add_subcommand(c.name, c.description);
    sub->fallthrough();
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  ExperimentConfig cfg;
  try {
    if (!config_path.empty()) cfg.load(config_path);
    for (const FlagSpec& f : kFlags) {
      if (opts[f.key]->count() == 0) continue;
      cfg.set(f.key, f.is_switch ? "true" : raw[f.key]);
    }
    for (CLI::App* sub : subs)
      if (sub->parsed()) cfg.command = sub->get_name();
    cfg.validate();
    if (!save_path.empty()) cfg.save(save_path);
    if (cfg.command.empty()) {
      if (!save_path.empty()) return 0;
      throw ConfigError("no command given; see --help");
    }
    dispatch(cfg, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace hnodal::cli
