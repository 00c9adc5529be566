#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "flatpop/model.hpp"

namespace flatpop {

struct SolverConfig {
  double dt = 1.0 / 32.0;
  double t_end = 1.0;
  double tol_fp = 1e-8;          // fixed-point tolerance in the Bielecki metric
  int max_iterations = 50;
  std::optional<double> lambda;  // defaults to 2 * solver_constant
  double merge_radius = 0.0;     // compaction
  double weight_floor = 0.0;
  bool trapezoid_growth = false;  // growth-exponent quadrature; left-endpoint default
  /// Multiplies every growth-quadrature increment; != 1 deliberately breaks
  /// the scheme (negative control for the verification batteries).
  double debug_quadrature_skew = 1.0;
};

/// Uniform grid 0 = t_0 < ... < t_K = t_end with K = round(t_end / dt).
std::vector<double> solver_grid(const SolverConfig& cfg);

struct SolverDiagnostics {
  int iterations = 0;
  std::vector<double> residuals;       // Bielecki residual per iteration
  std::vector<double> mass_timeline;   // tv norm per snapshot
  double compaction_loss = 0.0;        // dropped mass, final application
  double compaction_moved = 0.0;       // moved-mass bound, final application
  bool apriori_bound_ok = true;
  std::vector<double> apriori_bound;   // Gronwall mass bound per snapshot
  std::vector<double> narrow_modulus;  // rho_F(mu_k, mu_{k+1}) / dt
  double lambda = 0.0;
  double contraction_constant = 0.0;   // the computed C
};

struct NonConvergenceError : std::runtime_error {
  NonConvergenceError(const std::string& what, std::vector<double> residuals)
      : std::runtime_error(what), residual_history(std::move(residuals)) {}
  std::vector<double> residual_history;
};

/// The three summands of the solution operator at every grid node, before
/// concatenation and compaction: transported initial condition, kernel
/// term, influx term. Kept separate so the consistency checks can evaluate
/// the bracketed integrals term by term.
struct OperatorTerms {
  std::vector<double> grid;
  std::vector<AtomicMeasure> initial;
  std::vector<AtomicMeasure> kernel;
  std::vector<AtomicMeasure> influx;
};

/// Evaluates the solution operator against the frozen path `nu` (the
/// kernel-term source) with left-endpoint quadrature in the birth-time
/// integrals and in the growth exponents. The initial term transports each
/// atom by direct flow evaluation from time 0; kernel and influx cohorts
/// step grid node to grid node, accumulating their growth exponent along
/// the way.
OperatorTerms assemble_operator_terms(const AtomicMeasure& mu0,
                                      const MeasurePath& nu,
                                      const ModelFunctions& model,
                                      const SolverConfig& cfg);

/// One application of the fixed-point map: concatenates the three terms
/// per node and compacts. Compaction losses accumulate into *diag when
/// given.
MeasurePath apply_solution_operator(const AtomicMeasure& mu0,
                                    const MeasurePath& nu,
                                    const ModelFunctions& model,
                                    const SolverConfig& cfg,
                                    SolverDiagnostics* diag = nullptr);

struct SolveResult {
  MeasurePath path;
  SolverDiagnostics diagnostics;
};

/// Banach iteration of the solution operator from the constant path mu0,
/// stopped when the Bielecki residual (lambda = 2C, weight = the kernel's
/// BL bound) drops below tol_fp. Throws NonConvergenceError with the
/// residual history when max_iterations is exhausted.
SolveResult solve_linear(const AtomicMeasure& mu0, const ModelFunctions& model,
                         const SolverConfig& cfg);

}  // namespace flatpop
