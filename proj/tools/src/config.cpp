#include "config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace hnodal::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(trim(cur));
  return parts;
}

template <class T>
T parse_number(const std::string& raw, const std::string& key) {
  const std::string s = trim(raw);
  T v{};
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc() || ptr != end)
    throw ConfigError("invalid value '" + raw + "' for " + key);
  return v;
}

bool parse_bool(const std::string& raw, const std::string& key) {
  const std::string s = trim(raw);
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ConfigError("invalid boolean '" + raw + "' for " + key);
}

std::vector<double> parse_doubles(const std::string& s, const std::string& key) {
  std::vector<double> v;
  if (trim(s).empty()) return v;
  for (const auto& part : split(s, ',')) v.push_back(parse_number<double>(part, key));
  return v;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
  return s;
}

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::string format_range(const RadiusRange& r) {
  if (r.empty()) return "";
  return format_double(r.start) + ":" + format_double(r.stop) + ":" + format_double(r.step);
}

struct Field {
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  bool output_only = false;
};

// Fixed order: serialization order and therefore the hash depend on it.
const std::vector<std::pair<std::string, Field>>& fields() {
  using C = ExperimentConfig;
  using S = const std::string&;
  static const std::vector<std::pair<std::string, Field>> table = {
      {"command", {[](const C& c) { return c.command; }, [](C& c, S v) { c.command = v; }}},
      {"d", {[](const C& c) { return std::to_string(c.d); },
             [](C& c, S v) { c.d = parse_number<int>(v, "d"); }}},
      {"E", {[](const C& c) { return format_double(c.E); },
             [](C& c, S v) { c.E = parse_number<double>(v, "E"); }}},
      {"N", {[](const C& c) { return std::to_string(c.N); },
             [](C& c, S v) { c.N = parse_number<int>(v, "N"); }}},
      {"seed", {[](const C& c) { return std::to_string(c.seed); },
                [](C& c, S v) { c.seed = parse_number<std::uint64_t>(v, "seed"); }}},
      {"samples", {[](const C& c) { return std::to_string(c.samples); },
                   [](C& c, S v) { c.samples = parse_number<int>(v, "samples"); }}},
      {"grid_spacing", {[](const C& c) { return format_double(c.grid_spacing); },
                        [](C& c, S v) { c.grid_spacing = parse_number<double>(v, "grid_spacing"); }}},
      {"out", {[](const C& c) { return c.out; }, [](C& c, S v) { c.out = v; }, true}},
      {"format", {[](const C& c) { return c.format; }, [](C& c, S v) { c.format = v; }, true}},
      {"radii", {[](const C& c) { return format_range(c.radii); },
                 [](C& c, S v) { c.radii = parse_range(v); }}},
      {"points", {[](const C& c) { return format_points(c.points); },
                  [](C& c, S v) { c.points = parse_points(v); }}},
      {"y_points", {[](const C& c) { return format_points(c.y_points); },
                    [](C& c, S v) { c.y_points = parse_points(v); }}},
      {"method", {[](const C& c) { return c.method; }, [](C& c, S v) { c.method = v; }}},
      {"jet", {[](const C& c) { return std::string(c.jet ? "true" : "false"); },
               [](C& c, S v) { c.jet = parse_bool(v, "jet"); }}},
      {"levels", {[](const C& c) { return join(c.levels); },
                  [](C& c, S v) {
                    c.levels.clear();
                    if (!trim(v).empty())
                      for (const auto& p : split(v, ',')) c.levels.push_back(parse_number<int>(p, "levels"));
                  }}},
      {"center", {[](const C& c) { return join(c.center); },
                  [](C& c, S v) { c.center = parse_doubles(v, "center"); }}},
      {"radius", {[](const C& c) { return format_double(c.radius); },
                  [](C& c, S v) { c.radius = parse_number<double>(v, "radius"); }}},
      {"epsilon", {[](const C& c) { return format_double(c.epsilon); },
                   [](C& c, S v) { c.epsilon = parse_number<double>(v, "epsilon"); }}},
      {"nodes", {[](const C& c) { return std::to_string(c.nodes); },
                 [](C& c, S v) { c.nodes = parse_number<int>(v, "nodes"); }}},
      {"grid", {[](const C& c) { return std::to_string(c.grid); },
                [](C& c, S v) { c.grid = parse_number<int>(v, "grid"); }}},
      {"grid_out", {[](const C& c) { return c.grid_out; }, [](C& c, S v) { c.grid_out = v; }, true}},
      {"extent", {[](const C& c) { return format_double(c.extent); },
                  [](C& c, S v) { c.extent = parse_number<double>(v, "extent"); }}},
      {"quad_order", {[](const C& c) { return std::to_string(c.quad_order); },
                      [](C& c, S v) { c.quad_order = parse_number<int>(v, "quad_order"); }}},
      {"alias_tol", {[](const C& c) { return format_double(c.alias_tol); },
                     [](C& c, S v) { c.alias_tol = parse_number<double>(v, "alias_tol"); }}},
      {"origin_factor", {[](const C& c) { return format_double(c.origin_factor); },
                         [](C& c, S v) { c.origin_factor = parse_number<double>(v, "origin_factor"); }}},
      {"caustic_kappa", {[](const C& c) { return format_double(c.caustic_kappa); },
                         [](C& c, S v) { c.caustic_kappa = parse_number<double>(v, "caustic_kappa"); }}},
      {"reject_caustic", {[](const C& c) { return std::string(c.reject_caustic ? "true" : "false"); },
                          [](C& c, S v) { c.reject_caustic = parse_bool(v, "reject_caustic"); }}},
  };
  return table;
}

}  // namespace

std::vector<double> RadiusRange::values() const {
  std::vector<double> v;
  if (empty()) return v;
  const double span = (stop - start) / step;
  const long n = static_cast<long>(std::floor(span + 1e-9)) + 1;
  for (long i = 0; i < n; ++i) v.push_back(start + static_cast<double>(i) * step);
  return v;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_points(const std::vector<std::vector<double>>& pts) {
  std::string s;
  for (std::size_t i = 0; i < pts.size(); ++i) s += (i ? ";" : "") + join(pts[i]);
  return s;
}

std::vector<std::vector<double>> parse_points(const std::string& s) {
  std::vector<std::vector<double>> pts;
  if (trim(s).empty()) return pts;
  for (const auto& p : split(s, ';')) pts.push_back(parse_doubles(p, "points"));
  return pts;
}

RadiusRange parse_range(const std::string& s) {
  if (trim(s).empty()) return {};
  const auto parts = split(s, ':');
  if (parts.size() != 3) throw ConfigError("radii must be start:stop:step, got '" + s + "'");
  RadiusRange r{parse_number<double>(parts[0], "radii"), parse_number<double>(parts[1], "radii"),
                parse_number<double>(parts[2], "radii")};
  if (!(r.step > 0) || !(r.stop >= r.start))
    throw ConfigError("radii needs step > 0 and stop >= start, got '" + s + "'");
  return r;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  for (const auto& [name, f] : fields()) {
    if (name == key) {
      f.set(*this, value);
      return;
    }
  }
  throw ConfigError("unknown config key '" + key + "'");
}

std::string ExperimentConfig::serialize() const {
  std::string s;
  for (const auto& [name, f] : fields()) s += name + " = " + f.get(*this) + "\n";
  return s;
}

std::uint64_t ExperimentConfig::hash() const {
  std::string s;
  for (const auto& [name, f] : fields())
    if (!f.output_only) s += name + " = " + f.get(*this) + "\n";
  return fnv1a64(s);
}

void ExperimentConfig::parse(std::istream& in) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line.erase(hash_pos);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

void ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  parse(in);
}

void ExperimentConfig::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write config '" + path + "'");
  out << serialize();
}

void ExperimentConfig::validate() const {
  if (d < 1) throw ConfigError("d must be >= 1");
  if (!(E > 0) || !std::isfinite(E)) throw ConfigError("E must be finite and > 0");
  if (N < 0) throw ConfigError("N must be >= 0");
  if (samples < 1) throw ConfigError("samples must be >= 1");
  if (format != "csv" && format != "json") throw ConfigError("format must be csv or json");
  if (method != "exact" && method != "mehler" && method != "both")
    throw ConfigError("method must be exact, mehler or both");
  if (quad_order < 2) throw ConfigError("quad_order must be >= 2");
  if (!(radius > 0)) throw ConfigError("radius must be > 0");
  if (!(alias_tol > 0)) throw ConfigError("alias_tol must be > 0");
  if (grid < 0) throw ConfigError("grid must be >= 0");
  if (!(extent > 0)) throw ConfigError("extent must be > 0");
  for (int n : levels)
    if (n < 0) throw ConfigError("levels must be >= 0");
  auto check_dims = [&](const std::vector<std::vector<double>>& pts, const char* what) {
    for (const auto& p : pts)
      if (static_cast<int>(p.size()) != d)
        throw ConfigError(std::string(what) + ": every point needs d = " + std::to_string(d) +
                          " coordinates");
  };
  check_dims(points, "points");
  check_dims(y_points, "y_points");
  if (!center.empty() && static_cast<int>(center.size()) != d)
    throw ConfigError("center needs d = " + std::to_string(d) + " coordinates");
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace hnodal::cli
