#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "stfv/run_config.hpp"
#include "stfv/runner.hpp"
#include "stfv/verify.hpp"

using namespace stfv;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string output;
};

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("stfv_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

Result cli(const std::string& args, const fs::path& cwd) {
  const fs::path log = cwd / "cli.log";
  const std::string cmd = "cd '" + cwd.string() + "' && '" + STFV_CLI_PATH + "' " + args + " > '" +
                          log.string() + "' 2>&1";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(log)};
}

fs::path write_config(const fs::path& dir, const std::string& name, const std::string& text) {
  const fs::path p = dir / name;
  std::ofstream(p) << text;
  return p;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(cell);
    rows.push_back(row);
  }
  return rows;
}

const std::string kConfigDir = STFV_CONFIG_DIR;

}  // namespace

TEST(Cli, PresetsListsAll) {
  const Result r = cli("presets", scratch_dir("presets"));
  EXPECT_EQ(r.code, 0);
  for (Preset p : kAllPresets) EXPECT_NE(r.output.find(std::string(to_string(p))), std::string::npos);
}

TEST(Cli, ConstantPresetHasZeroProduction) {
  const fs::path dir = scratch_dir("constant");
  const Result r = cli("run " + kConfigDir + "/constant.json", dir);
  ASSERT_EQ(r.code, 0) << r.output;
  const auto rows = read_csv(dir / "out/constant/budget.csv");
  ASSERT_EQ(rows.size(), 11u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"slab_index", "t", "total_U", "total_rhoS",
                                               "temporal_production", "spatial_production",
                                               "max_cell_residual"}));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_EQ(std::stod(rows[i][4]), 0.0);
    EXPECT_EQ(std::stod(rows[i][5]), 0.0);
    EXPECT_EQ(std::stod(rows[i][6]), 0.0);
  }
  const auto snap = read_csv(dir / "out/constant/snapshot_000009.csv");
  EXPECT_EQ(snap[0], (std::vector<std::string>{"x", "rho", "u", "p", "S", "U"}));
  EXPECT_EQ(snap.size(), 21u);
}

TEST(Cli, SodSummaryReportsMonotoneDecrease) {
  const fs::path dir = scratch_dir("sod");
  const Result r = cli("run " + kConfigDir + "/sod_upwind_es.json", dir);
  ASSERT_EQ(r.code, 0) << r.output;
  const Json s = Json::parse(slurp(dir / "out/sod/summary.json"));
  EXPECT_TRUE(s["entropy"]["monotone_total_U_decrease"].get<bool>());
  EXPECT_TRUE(s["error_norms"].is_object());
  EXPECT_TRUE(s.contains("overheating_metric"));
  EXPECT_GT(s["newton"]["total_iterations"].get<int>(), 0);
  EXPECT_TRUE(fs::exists(dir / "out/sod/snapshot_000000.csv"));
}

TEST(Cli, IdenticalRunsAreBitIdentical) {
  const fs::path a = scratch_dir("det_a"), b = scratch_dir("det_b");
  ASSERT_EQ(cli("run " + kConfigDir + "/sod_upwind_es.json", a).code, 0);
  ASSERT_EQ(cli("run " + kConfigDir + "/sod_upwind_es.json", b).code, 0);
  for (const char* f : {"budget.csv", "snapshot_000000.csv", "summary.json"}) {
    EXPECT_EQ(slurp(a / "out/sod" / f), slurp(b / "out/sod" / f)) << f;
  }
  const auto rows = read_csv(a / "out/sod/budget.csv");
  // 17 significant digits: every value parses back to itself.
  for (std::size_t i = 1; i < rows.size(); ++i)
    for (std::size_t k = 1; k < rows[i].size(); ++k)
      EXPECT_EQ(format_double(std::stod(rows[i][k])), rows[i][k]);
}

TEST(Cli, EchoedConfigReproducesRun) {
  const fs::path dir = scratch_dir("echo");
  ASSERT_EQ(cli("run " + kConfigDir + "/riemann_explicit.json", dir).code, 0);
  Json echo = Json::parse(slurp(dir / "out/riemann/summary.json"))["config"];
  echo["output"]["directory"] = "again";
  write_config(dir, "echo.json", echo.dump(2));
  ASSERT_EQ(cli("run echo.json", dir).code, 0);
  EXPECT_EQ(slurp(dir / "out/riemann/budget.csv"), slurp(dir / "again/budget.csv"));
  const Json s1 = Json::parse(slurp(dir / "out/riemann/summary.json"));
  const Json s2 = Json::parse(slurp(dir / "again/summary.json"));
  EXPECT_EQ(s1["entropy"], s2["entropy"]);
  EXPECT_EQ(s1["grid"], s2["grid"]);
  const auto snaps = [](const fs::path& d) {
    for (const auto& e : fs::directory_iterator(d))
      if (e.path().filename().string().rfind("snapshot_", 0) == 0) return e.path();
    return fs::path{};
  };
  EXPECT_EQ(slurp(snaps(dir / "out/riemann")), slurp(snaps(dir / "again")));
}

TEST(Cli, ConfigErrorsExitOne) {
  const fs::path dir = scratch_dir("config_errors");
  write_config(dir, "syntax.json", "{\n  \"problem\": {\"preset\": \"sod\"},\n  \"grid\": {\n}}}\n");
  Result r = cli("run syntax.json", dir);
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("line 4"), std::string::npos) << r.output;

  write_config(dir, "unknown.json",
               R"({"problem": {"preset": "sod"}, "grid": {"n_cells": 10, "bogus": 1}})");
  r = cli("run unknown.json", dir);
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("/grid/bogus"), std::string::npos) << r.output;

  write_config(dir, "preset.json", R"({"problem": {"preset": "lax"}, "grid": {"n_cells": 10}})");
  r = cli("run preset.json", dir);
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("/problem/preset"), std::string::npos) << r.output;

  EXPECT_EQ(cli("run does_not_exist.json", dir).code, 1);
  EXPECT_EQ(cli("frobnicate", dir).code, 1);
}

TEST(Cli, SolverFailureExitsTwoWithSlab) {
  const fs::path dir = scratch_dir("solver_failure");
  write_config(dir, "fail.json", R"({
    "problem": {"preset": "sod"},
    "grid": {"n_cells": 50, "cfl": 0.5, "n_slabs": 3},
    "newton": {"abs_tol": 1e-300, "rel_tol": 0.0, "max_iterations": 1}
  })");
  const Result r = cli("run fail.json", dir);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("slab 0"), std::string::npos) << r.output;
}

TEST(Cli, VerifySuitesPassAndDetectFaults) {
  const fs::path dir = scratch_dir("verify");
  for (const std::string& suite : verify_suites()) {
    const Result ok = cli("verify " + suite, dir);
    EXPECT_EQ(ok.code, 0) << ok.output;
    EXPECT_NE(ok.output.find("seed " + std::to_string(kVerifySeed)), std::string::npos);
    const Result bad = cli("verify " + suite + " --inject-fault", dir);
    EXPECT_EQ(bad.code, 3) << bad.output;
    EXPECT_NE(bad.output.find("offending"), std::string::npos) << bad.output;
  }
  EXPECT_EQ(cli("verify nonsense", dir).code, 1);
}

TEST(RunConfig, DerivesSlabsFromFinalTime) {
  const RunConfig rc =
      parse_run_config(R"({"problem": {"preset": "sod"}, "grid": {"n_cells": 100, "cfl": 0.5}})");
  EXPECT_EQ(rc.grid.n_cells, 100);
  EXPECT_NEAR(rc.grid.dt * rc.grid.n_slabs, 0.2, 1e-14);
  EXPECT_LE(rc.grid.lambda() * max_wave_speed(cell_means(rc.problem, rc.grid), rc.problem.gas),
            0.5 + 1e-12);
  EXPECT_EQ(rc.grid.boundary, Boundary::Transmissive);
}

TEST(RunConfig, SlabsAndFinalTimeFixDt) {
  const RunConfig rc = parse_run_config(
      R"({"problem": {"preset": "constant"}, "grid": {"n_cells": 10, "n_slabs": 8, "t_final": 0.4}})");
  EXPECT_EQ(rc.grid.n_slabs, 8);
  EXPECT_DOUBLE_EQ(rc.grid.dt, 0.05);
  EXPECT_THROW(parse_run_config(R"({"problem": {"preset": "constant"},
      "grid": {"n_cells": 10, "n_slabs": 8, "t_final": 0.4, "dt": 0.1}})"),
               ConfigError);
  EXPECT_THROW(parse_run_config(R"({"problem": {"preset": "constant"},
      "grid": {"n_cells": 10, "n_slabs": 8, "t_final": 0.4, "cfl": 0.5}})"),
               ConfigError);
}

TEST(RunConfig, FieldDiagnostics) {
  auto field_of = [](const std::string& text) {
    try {
      parse_run_config(text);
    } catch (const ConfigError& e) {
      return e.field();
    }
    return std::string("<none>");
  };
  EXPECT_EQ(field_of(R"({"problem": {"preset": "sod"}})"), "/grid");
  EXPECT_EQ(field_of(R"({"problem": {"preset": "sod"}, "grid": {"n_cells": 2}})"), "/grid/n_cells");
  EXPECT_EQ(field_of(R"({"problem": {"preset": "sod"}, "grid": {"n_cells": 10},
      "scheme": {"temporal": {"flux": "upwind", "dissipation": {"kind": "theta_times_h", "theta": 0.5}}}})"),
            "/scheme/temporal/dissipation");
  EXPECT_EQ(field_of(R"({"problem": {"preset": "sod"}, "grid": {"n_cells": 10},
      "scheme": {"temporal": {"flux": "roe", "dissipation": {"kind": "theta_times_h", "theta": 2}}}})"),
            "/scheme/temporal/dissipation");
  EXPECT_EQ(field_of(R"({"problem": {"preset": "sod"}, "grid": {"n_cells": 10},
      "scheme": {"spatial": {"dissipation": {"kind": "theta_times_h", "theta": 0.5}}}})"),
            "/scheme/spatial/dissipation/kind");
  EXPECT_EQ(field_of(R"({"problem": {"preset": "sod"}, "grid": {"n_cells": 10},
      "coupling": {"mode": "block"}})"),
            "/coupling/block_size");
  EXPECT_EQ(field_of(R"({"problem": {"riemann": {"left": {"rho": -1, "u": 0, "p": 1},
      "right": {"rho": 1, "u": 0, "p": 1}, "x0": 0.5, "t_final": 0.1}}, "grid": {"n_cells": 10}})"),
            "/problem/riemann/left");
  EXPECT_EQ(field_of(R"({"problem": {"preset": "sod"}, "grid": {"n_cells": 10}, "gamma": 1.0})"),
            "/gamma");
}

TEST(RunConfig, EchoParsesToSameConfig) {
  const RunConfig a = load_run_config(kConfigDir + "/toro123_ec_time.json");
  const RunConfig b = parse_run_config(to_json(a).dump());
  EXPECT_EQ(to_json(a), to_json(b));
  EXPECT_EQ(a.grid.dt, b.grid.dt);
  EXPECT_EQ(a.grid.n_slabs, b.grid.n_slabs);
  EXPECT_EQ(a.coupling.kind, CouplingMode::Kind::FullyCoupled);
}
