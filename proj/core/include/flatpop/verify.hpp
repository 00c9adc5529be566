#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "flatpop/nonlinear_solver.hpp"

namespace flatpop {

struct CheckResult {
  std::string name;
  bool passed = false;
  double observed = 0.0;   // worst value seen
  double threshold = 0.0;  // what it was held against
};

struct SuiteResult {
  std::string suite;
  std::vector<CheckResult> checks;
  bool all_passed() const;
};

/// Property batteries behind `verify <suite>`, seeded and deterministic.
/// quadrature_skew != 1 feeds the solver a deliberately broken growth
/// quadrature (negative control; the battery must then fail).
SuiteResult verify_flat(std::uint64_t seed);
SuiteResult verify_flows(std::uint64_t seed);
SuiteResult verify_linear(std::uint64_t seed, double quadrature_skew = 1.0);
SuiteResult verify_nonlinear(std::uint64_t seed);
SuiteResult verify_pde(std::uint64_t seed);

/// Dispatch by suite name (flat, flows, linear, nonlinear, pde); throws
/// std::invalid_argument on unknown names.
SuiteResult run_suite(const std::string& name, std::uint64_t seed,
                      double quadrature_skew = 1.0);

/// Battery models shared between the verification suites and the tests.
ModelFunctions transport_model(double velocity, int substeps = 100);
ModelFunctions growth_model(double rate);
ModelFunctions rotation_growth_model(double omega, double rate);
ModelFunctions influx_model(double rate, double source_position);
/// One-way mutation on a two-point space: state 0 emits rate * dirac_1,
/// state 1 emits nothing.
ModelFunctions two_state_one_way_model(double rate);
/// Mutual mutation: each state feeds the other at the given rate.
ModelFunctions two_state_mutual_model(double rate);
ModelFunctions mutation_shift_model(double rate, double offset,
                                    double velocity, int substeps = 100);
ModelFunctions logistic_model(double r, double K, double initial_mass);
ModelFunctions aggregation_model(double strength, int substeps = 100);

}  // namespace flatpop
