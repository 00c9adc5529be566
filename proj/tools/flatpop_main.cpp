#include <cstdio>
#include <cstdlib>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "flatpop/flat_metric.hpp"
#include "flatpop/scenario.hpp"
#include "flatpop/verify.hpp"

namespace {

// Exit codes: 0 success, 1 configuration error, 2 solver non-convergence,
// 3 verification failure.
constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kNoConvergence = 2;
constexpr int kVerifyFailure = 3;

std::uint64_t seed_from_env() {
  if (const char* env = std::getenv("FLATPOP_SEED"))
    return std::strtoull(env, nullptr, 10);
  return 42;
}

int cmd_run(const std::string& config_path, const std::vector<std::string>& sets,
            bool verbose_lp) {
  try {
    flatpop::Scenario scenario = flatpop::load_scenario_file(config_path, sets);
    flatpop::RunOutcome outcome = flatpop::run_scenario(scenario);
    std::printf("solved %zu snapshots on [0, %.17g]\n", outcome.path.size(),
                scenario.solver.t_end);
    if (!scenario.snapshots_path.empty())
      std::printf("snapshots: %s\n", scenario.snapshots_path.c_str());
    if (!scenario.diagnostics_path.empty())
      std::printf("diagnostics: %s\n", scenario.diagnostics_path.c_str());
    if (verbose_lp && outcome.path.size() >= 2) {
      const auto problem = flatpop::assemble_flat_problem(
          outcome.path.at(0), outcome.path.at(outcome.path.size() - 1));
      const auto solution = flatpop::flat_lp_solve(problem);
      std::printf("%s\n", flatpop::flat_lp_to_json(problem, solution).dump(2).c_str());
    }
    return kOk;
  } catch (const flatpop::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const flatpop::NonConvergenceError& e) {
    std::fprintf(stderr, "solver did not converge: %s\n", e.what());
    return kNoConvergence;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kConfigError;
  }
}

int cmd_verify(const std::string& suite, bool bad_quadrature) {
  try {
    const double skew = bad_quadrature ? 1.05 : 1.0;
    const flatpop::SuiteResult result =
        flatpop::run_suite(suite, seed_from_env(), skew);
    std::printf("%-40s %-6s %14s %14s\n", "check", "status", "observed", "threshold");
    for (const auto& check : result.checks)
      std::printf("%-40s %-6s %14.6g %14.6g\n", check.name.c_str(),
                  check.passed ? "pass" : "FAIL", check.observed, check.threshold);
    if (!result.all_passed()) {
      std::fprintf(stderr, "suite '%s' failed\n", suite.c_str());
      return kVerifyFailure;
    }
    std::printf("suite '%s' passed (%zu checks)\n", suite.c_str(),
                result.checks.size());
    return kOk;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kVerifyFailure;
  }
}

int cmd_distance(const std::string& file_a, const std::string& file_b,
                 const std::string& space_config) {
  try {
    flatpop::Scenario scenario = flatpop::load_scenario_file(space_config);
    const flatpop::MeasurePath a =
        flatpop::read_snapshots_csv(file_a, scenario.space);
    const flatpop::MeasurePath b =
        flatpop::read_snapshots_csv(file_b, scenario.space);
    if (a.grid() != b.grid()) {
      std::fprintf(stderr, "error: snapshot files have mismatched time grids\n");
      return kConfigError;
    }
    double sup = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      const double d = flatpop::flat_distance(a.at(k), b.at(k));
      sup = std::max(sup, d);
      std::printf("%.17g %.17g\n", a.grid()[k], d);
    }
    std::printf("sup %.17g\n", sup);
    return kOk;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kConfigError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"measure-valued structured population solver"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> sets;
  bool verbose_lp = false;
  CLI::App* run = app.add_subcommand("run", "solve a scenario config");
  run->add_option("config", config_path, "scenario JSON file")->required();
  run->add_option("--set", sets, "override config values, key.path=value");
  run->add_flag("--dump-lp", verbose_lp,
                "dump the flat LP between first and last snapshot");

  std::string suite;
  bool bad_quadrature = false;
  CLI::App* verify = app.add_subcommand("verify", "run a property battery");
  verify->add_option("suite", suite, "flat | flows | linear | nonlinear | pde")
      ->required();
  verify->add_flag("--debug-bad-quadrature", bad_quadrature,
                   "inject a broken growth quadrature (battery must fail)");

  std::string file_a, file_b, space_config;
  CLI::App* distance =
      app.add_subcommand("distance", "flat distance between snapshot files");
  distance->add_option("file_a", file_a, "first snapshot CSV")->required();
  distance->add_option("file_b", file_b, "second snapshot CSV")->required();
  distance->add_option("--space", space_config, "scenario config naming the space")
      ->required();

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return cmd_run(config_path, sets, verbose_lp);
  if (verify->parsed()) return cmd_verify(suite, bad_quadrature);
  if (distance->parsed()) return cmd_distance(file_a, file_b, space_config);
  return kConfigError;
}
