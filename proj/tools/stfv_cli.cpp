// stfv: run space-time finite-volume experiments and certification sweeps.
//
// Exit codes: 0 success, 1 config error, 2 solver failure, 3 verification
// failure.
#include <algorithm>
#include <iostream>

#include <CLI11.hpp>

#include "stfv/runner.hpp"
#include "stfv/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitSolver = 2;
constexpr int kExitVerify = 3;

int cmd_run(const std::string& path) {
  stfv::RunConfig rc;
  try {
    rc = stfv::load_run_config(path);
  } catch (const stfv::ConfigError& e) {
    std::cerr << path << ": " << e.what() << "\n";
    return kExitConfig;
  }
  try {
    const auto out = stfv::execute(rc);
    for (const auto& f : out.files) std::cout << "wrote " << f.string() << "\n";
    const auto& e = out.summary["entropy"];
    std::cout << "total_U " << stfv::format_double(e["initial_total_U"].get<double>()) << " -> "
              << stfv::format_double(e["final_total_U"].get<double>())
              << ", monotone decrease: " << (e["monotone_total_U_decrease"].get<bool>() ? "yes" : "no")
              << "\n";
    return kExitOk;
  } catch (const stfv::SolverError& e) {
    std::cerr << "solver failure at slab " << e.slab() << ": " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kExitSolver;
  }
}

int cmd_verify(const std::string& suite, std::uint64_t seed, bool fault) {
  const auto& names = stfv::verify_suites();
  const bool all = suite == "all";
  if (!all && std::find(names.begin(), names.end(), suite) == names.end()) {
    std::cerr << "unknown suite \"" << suite << "\"\n";
    return kExitConfig;
  }
  bool ok = true;
  for (const auto& name : names) {
    if (!all && name != suite) continue;
    const auto report = stfv::run_verify_suite(name, {seed, fault});
    std::cout << stfv::format_report(report);
    ok = ok && report.passed();
  }
  return ok ? kExitOk : kExitVerify;
}

int cmd_presets() {
  for (stfv::Preset p : stfv::kAllPresets) {
    const stfv::Problem pr = stfv::make_preset(p);
    std::cout << stfv::to_string(p) << "  t_final=" << pr.t_final
              << "  boundary=" << stfv::to_string(pr.boundary) << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Space-time finite-volume Euler solver with entropy ledger"};
  app.require_subcommand(1);

  std::string config;
  auto* run = app.add_subcommand("run", "solve a configured problem and write outputs");
  run->add_option("config", config, "JSON run configuration")->required();

  std::string suite;
  std::uint64_t seed = stfv::kVerifySeed;
  bool fault = false;
  auto* verify = app.add_subcommand("verify", "run a seeded certification sweep");
  verify->add_option("suite", suite, "ec-conditions | spd | upwind-decomposition | telescoping | all")
      ->required();
  verify->add_option("--seed", seed, "random seed")->capture_default_str();
  verify->add_flag("--inject-fault", fault, "corrupt the quantity under test (self-check)");

  auto* presets = app.add_subcommand("presets", "list the built-in problems");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  if (*run) return cmd_run(config);
  if (*verify) return cmd_verify(suite, seed, fault);
  if (*presets) return cmd_presets();
  return kExitConfig;
}
