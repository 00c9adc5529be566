#pragma once

#include <functional>
#include <string>
#include <vector>

#include "flatpop/linear_solver.hpp"
#include "flatpop/model.hpp"

namespace flatpop {

/// Separable test function phi(t) psi(x) on [0,T] x R^d. The spatial part
/// is multiplied by a smooth radial bump (1 inside cutoff_inner, 0 outside
/// cutoff_outer) so the identity is checked against a compactly supported
/// test function; the cutoff radii are reported alongside results.
struct TestFunction {
  std::string name;
  std::function<double(double)> phi;
  std::function<double(double)> dphi;
  std::function<double(const std::vector<double>&)> psi;
  std::function<std::vector<double>(const std::vector<double>&)> grad_psi;
  double cutoff_inner = 50.0;
  double cutoff_outer = 100.0;

  double spatial(const std::vector<double>& x) const;
  std::vector<double> spatial_gradient(const std::vector<double>& x) const;
};

/// Six canonical test functions (polynomial, trigonometric, constant
/// spatial parts crossed with constant and moving temporal parts).
std::vector<TestFunction> canonical_test_functions();

/// LHS - RHS of the weak formulation evaluated on a solver path, all time
/// integrals by the left-endpoint rule on the path's grid. Requires a
/// Euclidean backend whose flow is generated by a vector field.
double weak_residual(const MeasurePath& path, const ModelFunctions& model,
                     const TestFunction& tf);

/// Central difference of F(t) = int psi d(mu_t) at interior grid node k
/// versus the instantaneous balance integral
/// int (grad psi . b + psi c) dmu + int int psi d(eta) dmu + int psi dN.
struct DerivativePair {
  double lhs = 0.0;
  double rhs = 0.0;
  double discrepancy() const { return lhs > rhs ? lhs - rhs : rhs - lhs; }
};
DerivativePair derivative_check(const MeasurePath& path,
                                const ModelFunctions& model,
                                const TestFunction& tf, std::size_t k);

/// Term-by-term evaluation of the transport and growth brackets of the
/// derivative identity: each side of the pair sums the bracketed integral
/// over one family of the operator decomposition (initial / kernel /
/// influx) versus over the combined snapshot. Pure algebra when the
/// operator runs uncompacted, so agreement is at rounding level.
struct SplitCheck {
  double transport_by_terms = 0.0;  // A + D + G
  double transport_combined = 0.0;
  double growth_by_terms = 0.0;  // B + E + H
  double growth_combined = 0.0;
};
SplitCheck split_check(const AtomicMeasure& mu0, const ModelFunctions& model,
                       const SolverConfig& cfg, const TestFunction& tf,
                       std::size_t k);

/// Least-squares slope of log|residual| against log dt.
double fit_order(const std::vector<double>& dts,
                 const std::vector<double>& residuals);

struct ConsistencyEntry {
  std::string test_function;
  std::vector<double> dts;
  std::vector<double> residuals;
  double order = 0.0;
};

struct ConsistencyReport {
  std::vector<ConsistencyEntry> entries;
  double cutoff_inner = 0.0;
  double cutoff_outer = 0.0;
};

/// Runs weak_residual across the canonical test functions at each grid
/// resolution and fits the convergence order per test function. The
/// scenario solve is repeated per dt with compaction off.
ConsistencyReport consistency_report(const AtomicMeasure& mu0,
                                     const ModelFunctions& model,
                                     const SolverConfig& base_cfg,
                                     const std::vector<double>& dts);

}  // namespace flatpop
