#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "flatpop/flat_metric.hpp"
#include "flatpop/nonlinear_solver.hpp"
#include "flatpop/pde_consistency.hpp"

namespace flatpop {

/// A fully wired run description: space, model, initial measure, solver
/// settings and output destinations, built from a schema-1 JSON config.
struct Scenario {
  SpacePtr space;
  ModelFunctions model;
  AtomicMeasure initial;
  SolverConfig solver;
  std::string mode = "auto";  // auto | linear | nonlinear
  std::string snapshots_path;
  std::string diagnostics_path;
  std::string consistency_path;
};

/// Raised on schema violations; the message names the offending key.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

Scenario load_scenario(const nlohmann::json& config);
/// Reads the file and applies dotted-path overrides ("solver.dt=0.01")
/// before interpretation. Values parse as JSON, falling back to strings.
Scenario load_scenario_file(const std::string& path,
                            const std::vector<std::string>& overrides = {});

SpacePtr space_from_json(const nlohmann::json& block);
Point location_from_json(const nlohmann::json& value, const MetricSpace& space);

/// Backend-specific printable form: comma-joined coordinates, edge:offset,
/// angle, index, or comma-joined samples. 17 significant digits.
std::string location_repr(const Point& p);
Point parse_location_repr(const std::string& repr, const MetricSpace& space);

/// Snapshot CSV with header time,atom,location,weight; the location field
/// is quoted when it contains commas. Round-trips losslessly.
void write_snapshots_csv(const std::string& path, const MeasurePath& measure_path);
MeasurePath read_snapshots_csv(const std::string& path, SpacePtr space);

nlohmann::json diagnostics_to_json(const SolverDiagnostics& diag);
nlohmann::json diagnostics_to_json(const NonlinearDiagnostics& diag);
nlohmann::json consistency_to_json(const ConsistencyReport& report);
/// LP dump (support, coefficients, optimal test-function values) for the
/// verbose diagnostics path.
nlohmann::json flat_lp_to_json(const FlatProblem& problem,
                               const FlatSolution& solution);

struct RunOutcome {
  MeasurePath path;
  nlohmann::json diagnostics;
};

/// Solves the scenario (linear or nonlinear per `mode`, auto-detected from
/// measure dependence by default) and writes whichever outputs are
/// configured. The consistency report is produced only on Euclidean
/// backends with a vector-field flow.
RunOutcome run_scenario(const Scenario& scenario);

}  // namespace flatpop
