#pragma once

#include "flatpop/linear_solver.hpp"

namespace flatpop {

struct NonlinearDiagnostics {
  int outer_iterations = 0;
  std::vector<double> outer_residuals;
  double mass_radius = 0.0;  // the ball the Lipschitz constants are read on
  bool radius_respected = true;
  double lambda = 0.0;
  double model_constant = 0.0;  // C_M
  SolverDiagnostics linear;     // diagnostics of the final inner solve
};

struct NonlinearResult {
  MeasurePath path;
  NonlinearDiagnostics diagnostics;
};

/// Linear model with the measure arguments bound to the frozen path:
/// c(t,x) = c(t,x,p_t), eta and N likewise, X(t,tau,x) = X(t,tau,x,p).
/// Declared bounds carry over unchanged (they are uniform on the mass
/// ball).
ModelFunctions freeze_model(const ModelFunctions& model, MeasurePath frozen);

/// C * exp(C * int ||eta||_BL dt): the constant the continuity-in-data and
/// continuity-in-model estimates are stated with.
double model_constant(const ModelFunctions& model, double t_end);

/// Outer fixed point: freeze the measure argument in all four model
/// functions simultaneously, solve the linear problem, repeat. Stops when
/// the Bielecki residual (weight = summed measure-Lipschitz rates,
/// lambda = 2 C_M) falls below cfg.tol_fp.
NonlinearResult solve_nonlinear(const AtomicMeasure& mu0,
                                const ModelFunctions& model,
                                const SolverConfig& cfg);

struct StabilityReport {
  double sup_flat_distance = 0.0;  // sup_t rho_F(mu^a_t, mu^b_t)
  /// Sampled surrogate of the continuity-in-model right-hand side:
  /// C_M * [ int sup_x rho_F(eta_a, eta_b) + int rho_F(N_a, N_b)
  ///       + int ||c_a - c_b||_inf + sup ||X_a - X_b|| ].
  double surrogate_bound = 0.0;
  double ratio = 0.0;  // sup_flat_distance / surrogate_bound (0 if both agree)
  double model_constant = 0.0;
};

/// Solves both models from mu0 and compares the paths against the sampled
/// continuity surrogate. Sups over states and measures are estimated on a
/// Monte-Carlo budget (they are not computable exactly), so the surrogate
/// is indicative, not certified.
StabilityReport stability_experiment(const ModelFunctions& model_a,
                                     const ModelFunctions& model_b,
                                     const AtomicMeasure& mu0,
                                     const SolverConfig& cfg,
                                     int sample_budget = 64,
                                     unsigned long long seed = 42);

}  // namespace flatpop
