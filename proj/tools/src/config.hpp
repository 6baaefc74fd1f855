#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace hnodal::cli {

/// Bad key, bad value or unusable combination; exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inclusive arithmetic range a:b:step.
struct RadiusRange {
  double start = 0.0;
  double stop = 0.0;
  double step = 0.0;
  bool empty() const { return step == 0.0; }
  std::vector<double> values() const;
  bool operator==(const RadiusRange&) const = default;
};

/// Every setting of one run. Keys on disk match the long flag names with
/// '-' replaced by '_'.
struct ExperimentConfig {
  std::string command;
  int d = 2;
  double E = 1.0;
  int N = 20;
  std::uint64_t seed = 20261014;
  int samples = 2000;
  double grid_spacing = 0.0;  ///< <= 0: h/6
  std::string out;            ///< empty: stdout
  std::string format = "csv";
  RadiusRange radii;
  std::vector<std::vector<double>> points;
  std::vector<std::vector<double>> y_points;
  std::string method = "both";
  bool jet = false;
  std::vector<int> levels{20, 40, 80};
  std::vector<double> center;  ///< empty: origin
  double radius = 0.3;
  double epsilon = 0.0;  ///< <= 0: adaptive default
  int nodes = 0;         ///< <= 0: adaptive default
  int grid = 0;          ///< lattice points per side for sample; 0 disables
  std::string grid_out;
  double extent = 2.0;
  int quad_order = 64;
  double alias_tol = 1e-12;
  double origin_factor = 10.0;
  double caustic_kappa = 10.0;
  bool reject_caustic = false;

  /// Throws ConfigError for inconsistent values.
  void validate() const;

  /// One "key = value" line per field, in fixed order.
  std::string serialize() const;
  /// Hash of the serialization without output-only keys (out, grid_out, format).
  std::uint64_t hash() const;

  /// Applies "key = value" lines on top of *this; '#' starts a comment.
  void parse(std::istream& in);
  void load(const std::string& path);
  void save(const std::string& path) const;

  /// Sets one key from its textual value. Throws ConfigError on unknown keys.
  void set(const std::string& key, const std::string& value);

  bool operator==(const ExperimentConfig&) const = default;
};

std::uint64_t fnv1a64(const std::string& bytes);

std::string format_double(double v);
std::string format_points(const std::vector<std::vector<double>>& pts);
std::vector<std::vector<double>> parse_points(const std::string& s);
RadiusRange parse_range(const std::string& s);

}  // namespace hnodal::cli
