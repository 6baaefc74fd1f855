#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "cli.hpp"
#include "config.hpp"
#include "hnodal/nodal_mc.hpp"

using namespace hnodal;
using namespace hnodal::cli;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "hnodal");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

struct Csv {
  std::vector<std::string> comments;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  int col(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return static_cast<int>(i);
    return -1;
  }
  double num(std::size_t row, const std::string& name) const { return std::stod(rows[row][col(name)]); }
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) v.push_back(item);
  return v;
}

Csv parse_csv(const std::string& text) {
  Csv c;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("#", 0) == 0) {
      c.comments.push_back(line);
    } else if (c.columns.empty()) {
      c.columns = split(line, ',');
    } else if (!line.empty()) {
      c.rows.push_back(split(line, ','));
    }
  }
  return c;
}

std::filesystem::path temp_dir() {
  auto dir = std::filesystem::temp_directory_path() /
             ("hnodal_cli_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
              ::testing::UnitTest::GetInstance()->current_test_info()->name());
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int region_rank(const std::string& r) {
  if (r == "origin") return 0;
  if (r == "allowed") return 1;
  if (r == "caustic_band") return 2;
  return 3;
}

}  // namespace

TEST(CliDensity, RadiusSweepGivesFifteenRowsWithMonotoneRegion) {
  const Result r = invoke({"density", "--d", "2", "--E", "1", "--N", "40", "--radii", "0.4:1.8:0.1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Csv c = parse_csv(r.out);
  ASSERT_EQ(c.rows.size(), 15u);
  const std::vector<std::string> expect = {"x_1", "x_2", "r", "region", "F_exact", "F_leading", "ratio"};
  EXPECT_EQ(c.columns, expect);
  for (std::size_t i = 1; i < c.rows.size(); ++i)
    EXPECT_LE(region_rank(c.rows[i - 1][3]), region_rank(c.rows[i][3]));
  EXPECT_EQ(c.rows.front()[3], "allowed");
  EXPECT_EQ(c.rows.back()[3], "forbidden");
}

TEST(CliDensity, RatioMovesTowardOneAtRadiusPoint8) {
  std::vector<double> gaps;
  for (const char* N : {"20", "40", "80"}) {
    const Result r = invoke({"density", "--N", N, "--points", "0.8,0"});
    ASSERT_EQ(r.code, 0) << r.err;
    gaps.push_back(std::abs(parse_csv(r.out).num(0, "ratio") - 1));
  }
  EXPECT_LT(gaps[1], gaps[0]);
  EXPECT_LT(gaps[2], gaps[0]);
  EXPECT_LT(gaps[2], 0.1);
}

TEST(CliDensity, ExclusionsExitWithCodeTwo) {
  const Result origin = invoke({"density", "--N", "40", "--points", "0.01,0"});
  EXPECT_EQ(origin.code, 2);
  EXPECT_NE(origin.err.find("origin exclusion"), std::string::npos);
  const Result caustic = invoke({"density", "--N", "40", "--points", "1.4,0", "--reject-caustic"});
  EXPECT_EQ(caustic.code, 2);
  EXPECT_NE(caustic.err.find("caustic exclusion"), std::string::npos);
  EXPECT_EQ(invoke({"density", "--N", "40", "--points", "1.4,0"}).code, 0);
}

TEST(CliKernel, ResidualBelowTolerance) {
  for (const char* N : {"5", "20", "40"}) {
    const Result r = invoke({"kernel", "--N", N, "--points", "0.3,0.2;1.2,-0.4;-0.9,1.1", "--y-points",
                             "-0.5,0.1;0.2,0.7;1.3,0.4"});
    ASSERT_EQ(r.code, 0) << r.err;
    const Csv c = parse_csv(r.out);
    ASSERT_EQ(c.rows.size(), 3u);
    for (std::size_t i = 0; i < c.rows.size(); ++i) EXPECT_LT(c.num(i, "residual"), 1e-10) << N;
  }
}

TEST(CliKernel, GroundStateClosedForm) {
  const Result r = invoke({"kernel", "--d", "1", "--N", "0", "--points", "0.7"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Csv c = parse_csv(r.out);
  const double h = 2.0;  // E / (N + 1/2)
  const double ref = std::exp(-0.49 / h) / std::sqrt(std::acos(-1.0) * h);
  EXPECT_NEAR(c.num(0, "exact"), ref, 1e-15);
  EXPECT_NEAR(c.num(0, "mehler"), ref, 1e-12);
}

TEST(CliKernel, JsonAndCsvCarryIdenticalNumbers) {
  const std::vector<std::string> base = {"kernel", "--N", "12", "--points", "0.3,0.2;1.5,0.1"};
  auto csv_args = base;
  auto json_args = base;
  json_args.insert(json_args.end(), {"--format", "json"});
  const Result a = invoke(csv_args);
  const Result b = invoke(json_args);
  ASSERT_EQ(a.code, 0);
  ASSERT_EQ(b.code, 0);
  const Csv c = parse_csv(a.out);
  const auto j = nlohmann::json::parse(b.out);
  ASSERT_EQ(j["rows"].size(), c.rows.size());
  for (std::size_t i = 0; i < c.rows.size(); ++i) {
    for (const char* col : {"exact", "mehler", "alias_bound", "residual"})
      EXPECT_EQ(j["rows"][i][col].get<double>(), c.num(i, col)) << col;
    EXPECT_EQ(j["rows"][i]["arithmetic"].get<std::string>(), c.rows[i][c.col("arithmetic")]);
  }
}

TEST(CliKernel, JetRows) {
  const Result r = invoke({"kernel", "--N", "6", "--points", "0.3,0.2", "--jet"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Csv c = parse_csv(r.out);
  const std::vector<std::string> expect = {"x_1", "x_2", "pi", "grad_1", "grad_2", "hess_11", "hess_12", "hess_22"};
  EXPECT_EQ(c.columns, expect);
  EXPECT_GT(c.num(0, "pi"), 0);
}

TEST(CliSample, FixedSeedGivesByteIdenticalOutputs) {
  const auto dir = temp_dir();
  std::vector<std::string> content;
  for (int k = 0; k < 2; ++k) {
    const auto dump = dir / ("c" + std::to_string(k) + ".bin");
    const auto grid = dir / ("g" + std::to_string(k) + ".csv");
    const Result r = invoke({"sample", "--N", "15", "--seed", "99", "--out", dump.string(), "--grid", "21",
                             "--grid-out", grid.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    content.push_back(slurp(dump));
    content.push_back(slurp(grid));
  }
  EXPECT_EQ(content[0], content[2]);
  EXPECT_EQ(content[1], content[3]);
  // int64 d, N, seed header then dim V_15 = 16 coefficients.
  EXPECT_EQ(content[0].size(), 8u * (3 + 16));
  const Csv g = parse_csv(content[1]);
  EXPECT_EQ(g.rows.size(), 21u * 21u);
  std::filesystem::remove_all(dir);
}

TEST(CliSweep, FittedExponents) {
  const Result r = invoke({"sweep", "--levels", "20,40,80", "--radii", "0.7:1.8:1.1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Csv c = parse_csv(r.out);
  ASSERT_EQ(c.rows.size(), 6u);
  EXPECT_NEAR(c.num(0, "fitted_exponent"), -1.0, 0.1);
  EXPECT_NEAR(c.num(5, "fitted_exponent"), -0.5, 0.1);
  EXPECT_EQ(c.rows[5][c.col("region")], "forbidden");
}

TEST(CliMc, ReportJsonSchema) {
  const Result r =
      invoke({"mc", "--N", "12", "--center", "0.8,0", "--radius", "0.3", "--samples", "40", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["hnodal_version"], "0.1.0");
  EXPECT_EQ(j["config_hash"].get<std::string>().size(), 16u);
  const auto& rep = j["report"];
  for (const char* key : {"route", "params", "ball", "mc", "kacrice_exact", "kacrice_error", "asymptotic",
                          "z_score", "relative_gaps"})
    EXPECT_TRUE(rep.contains(key)) << key;
  EXPECT_TRUE(rep["z_score"].is_number());
  EXPECT_TRUE(rep["mc"]["stderr"].is_number());
  const ComparisonReport back = rep.get<ComparisonReport>();
  EXPECT_EQ(back.mc.n_samples, 40);
  EXPECT_EQ(back.route, "kac_rice_mc");
}

TEST(CliCompare, OneRowPerLevel) {
  const Result r = invoke({"compare", "--levels", "10,14", "--center", "0.5,0.2", "--radius", "0.2",
                           "--samples", "20"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Csv c = parse_csv(r.out);
  ASSERT_EQ(c.rows.size(), 2u);
  EXPECT_EQ(c.rows[0][0], "10");
  EXPECT_EQ(c.rows[1][0], "14");
  EXPECT_TRUE(std::isfinite(c.num(1, "z_score")));
}

TEST(CliOutput, EveryOutputCarriesVersionAndHash) {
  const Result r = invoke({"density", "--N", "40", "--points", "0.5,0"});
  const Csv c = parse_csv(r.out);
  ASSERT_EQ(c.comments.size(), 2u);
  EXPECT_EQ(c.comments[0], "# hnodal 0.1.0");
  EXPECT_EQ(c.comments[1].rfind("# config_hash ", 0), 0u);
  const Result j = invoke({"density", "--N", "40", "--points", "0.5,0", "--format", "json"});
  const auto doc = nlohmann::json::parse(j.out);
  EXPECT_EQ(doc["hnodal_version"], "0.1.0");
  EXPECT_EQ(doc["config_hash"].get<std::string>(), c.comments[1].substr(14));
  EXPECT_EQ(invoke({"density", "--N", "40", "--points", "0.5,0"}).out, r.out);
}

TEST(CliOutput, VersionFlag) {
  const Result r = invoke({"--version"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("0.1.0"), std::string::npos);
}

TEST(CliErrors, UsageAndConfigErrorsExitOne) {
  EXPECT_EQ(invoke({"density", "--bogus", "1"}).code, 1);
  EXPECT_EQ(invoke({"density", "--N", "ten", "--points", "0.5,0"}).code, 1);
  EXPECT_EQ(invoke({"density", "--format", "xml", "--points", "0.5,0"}).code, 1);
  EXPECT_EQ(invoke({"density", "--points", "0.5"}).code, 1);
  EXPECT_EQ(invoke({}).code, 1);
  const auto dir = temp_dir();
  {
    std::ofstream(dir / "bad.cfg") << "N = 10\nsamplez = 4\n";
  }
  const Result r = invoke({"density", "--config", (dir / "bad.cfg").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("samplez"), std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST(CliErrors, CapacityAndAccuracyCodes) {
  EXPECT_EQ(invoke({"density", "--d", "3", "--N", "5000", "--points", "0.5,0,0"}).code, 4);
  EXPECT_EQ(invoke({"kernel", "--N", "6", "--points", "0.3,0.2", "--nodes", "8", "--epsilon", "1"}).code, 3);
}

TEST(CliConfig, SaveLoadRoundTripsAndFlagsOverride) {
  const auto dir = temp_dir();
  const auto cfg_path = dir / "run.cfg";
  const Result saved = invoke({"density", "--N", "33", "--radii", "0.5:0.9:0.2", "--save-config", cfg_path.string()});
  ASSERT_EQ(saved.code, 0) << saved.err;
  const std::string text = slurp(cfg_path);
  for (const char* key : {"command = density", "N = 33", "quad_order = 64", "caustic_kappa = 10", "seed = 20261014"})
    EXPECT_NE(text.find(key), std::string::npos) << key;

  ExperimentConfig loaded;
  loaded.load(cfg_path.string());
  EXPECT_EQ(loaded.N, 33);
  EXPECT_EQ(loaded.command, "density");
  EXPECT_EQ(loaded.serialize(), text);

  const Result replay = invoke({"--config", cfg_path.string()});
  ASSERT_EQ(replay.code, 0) << replay.err;
  EXPECT_EQ(replay.out, saved.out);
  EXPECT_EQ(parse_csv(replay.out).rows.size(), 3u);

  const Result over = invoke({"--config", cfg_path.string(), "--N", "34"});
  ASSERT_EQ(over.code, 0);
  EXPECT_NE(parse_csv(over.out).comments[1], parse_csv(saved.out).comments[1]);
  std::filesystem::remove_all(dir);
}

TEST(ExperimentConfig, RoundTripIsLossless) {
  ExperimentConfig c;
  c.command = "kernel";
  c.d = 3;
  c.E = 0.1 + 0.2;
  c.N = 17;
  c.seed = 18446744073709551615ULL;
  c.points = {{0.1, 1.0 / 3, -2.5e-7}, {1, 2, 3}};
  c.y_points = {{std::nextafter(1.0, 2.0), 0, 0}};
  c.radii = parse_range("0.25:1.75:0.125");
  c.levels = {5, 7};
  c.center = {0.3, 0.4, 0.5};
  c.jet = true;
  c.alias_tol = 3e-13;
  std::istringstream in(c.serialize());
  ExperimentConfig back;
  back.parse(in);
  EXPECT_EQ(back, c);
}

TEST(ExperimentConfig, StrictKeysAndValues) {
  ExperimentConfig c;
  EXPECT_THROW(c.set("radiuss", "1"), ConfigError);
  EXPECT_THROW(c.set("N", "3.5"), ConfigError);
  EXPECT_THROW(c.set("E", "1x"), ConfigError);
  EXPECT_THROW(c.set("jet", "maybe"), ConfigError);
  EXPECT_THROW(c.set("radii", "1:0:0.1"), ConfigError);
  std::istringstream bad("N 3\n");
  EXPECT_THROW(c.parse(bad), ConfigError);
  std::istringstream ok("# comment\n\nN = 3  # trailing\n");
  c.parse(ok);
  EXPECT_EQ(c.N, 3);
}

TEST(ExperimentConfig, HashIgnoresOutputOnlyKeys) {
  ExperimentConfig a, b;
  b.out = "x.csv";
  b.format = "json";
  b.grid_out = "g.csv";
  EXPECT_EQ(a.hash(), b.hash());
  b.N = 21;
  EXPECT_NE(a.hash(), b.hash());
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(RadiusRange, InclusiveCount) {
  EXPECT_EQ(parse_range("0.4:1.8:0.1").values().size(), 15u);
  EXPECT_EQ(parse_range("1:1:0.5").values().size(), 1u);
  EXPECT_TRUE(parse_range("").values().empty());
}

TEST(CliConfig, CheckedInBallConfigsReproduce) {
  const std::filesystem::path dir = HNODAL_CONFIG_DIR;
  std::uint64_t seed = 0;
  for (const char* name : {"mc_allowed_ball.cfg", "mc_forbidden_ball.cfg"}) {
    ExperimentConfig c;
    c.load((dir / name).string());
    EXPECT_NO_THROW(c.validate());
    EXPECT_EQ(c.command, "mc");
    if (seed == 0) seed = c.seed;
    EXPECT_EQ(c.seed, seed) << name;
    const Result r = invoke({"--config", (dir / name).string()});
    ASSERT_EQ(r.code, 0) << name << ": " << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_LT(std::abs(j["report"]["z_score"].get<double>()), 4.0) << name;
  }
}
