#include "flatpop/nonlinear_solver.hpp"

#include <cmath>
#include <limits>
#include <memory>

#include "flatpop/flat_metric.hpp"
#include "flatpop/rng.hpp"

namespace flatpop {

ModelFunctions freeze_model(const ModelFunctions& model, MeasurePath frozen) {
  auto path = std::make_shared<const MeasurePath>(std::move(frozen));
  ModelFunctions out = model;
  out.measure_dependent = false;
  out.flow_measure_lip = 0.0;
  out.growth.value = [inner = model.growth.value, path](
                         double t, const Point& x, const AtomicMeasure*) {
    return inner(t, x, &path->at_time(t));
  };
  out.kernel.value = [inner = model.kernel.value, path](
                         double t, const Point& x, const AtomicMeasure*) {
    return inner(t, x, &path->at_time(t));
  };
  out.influx.value = [inner = model.influx.value, path](
                         double t, const AtomicMeasure*) {
    return inner(t, &path->at_time(t));
  };
  out.flow = FlowMap(
      [inner = model.flow, path](double t, double tau, const Point& x,
                                 const MeasurePath*) {
        return inner.at(t, tau, x, path.get());
      },
      [inner = model.flow](double dt) { return inner.lipschitz_bound(dt); },
      [inner = model.flow](double dt) { return inner.modulus(dt); },
      model.flow.invertible());
  if (model.field) {
    VectorField f = *model.field;
    f.velocity = [inner = model.field->velocity, path](
                     double t, const std::vector<double>& x,
                     const AtomicMeasure*) {
      return inner(t, x, &path->at_time(t));
    };
    out.field = std::move(f);
  }
  return out;
}

double model_constant(const ModelFunctions& model, double t_end) {
  const double C = solver_constant(model, t_end);
  const int n = 256;
  const double h = t_end / n;
  double eta_int = 0.0;
  for (int i = 0; i < n; ++i)
    eta_int += h * std::max(model.kernel.bl_bound(i * h),
                            model.kernel.bl_bound((i + 1) * h));
  return C * std::exp(C * eta_int);
}

NonlinearResult solve_nonlinear(const AtomicMeasure& mu0,
                                const ModelFunctions& model,
                                const SolverConfig& cfg) {
  const std::vector<double> grid = solver_grid(cfg);
  NonlinearDiagnostics diag;
  diag.model_constant = model_constant(model, cfg.t_end);
  diag.lambda = cfg.lambda.value_or(std::max(2.0 * diag.model_constant, 1e-12));
  // Margin for discretization overshoot above the a-priori mass bound.
  diag.mass_radius = 2.0 * apriori_mass_bound(model, mu0.tv_norm(), cfg.t_end);

  std::vector<double> rate(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k)
    rate[k] = model.growth.measure_lip(grid[k]) +
              model.kernel.measure_lip(grid[k]) +
              model.influx.measure_lip(grid[k]) + model.flow_measure_lip;

  SolverConfig inner_cfg = cfg;
  inner_cfg.lambda.reset();  // inner solves pick their own 2C

  MeasurePath current = MeasurePath::constant(grid, mu0);
  bool converged = false;
  for (int m = 1; m <= cfg.max_iterations; ++m) {
    SolveResult linear = solve_linear(mu0, freeze_model(model, current), inner_cfg);
    const double res =
        bielecki_distance(linear.path, current, diag.lambda, rate);
    diag.outer_residuals.push_back(res);
    diag.outer_iterations = m;
    diag.linear = std::move(linear.diagnostics);
    current = std::move(linear.path);
    for (const auto& snap : current.snapshots())
      if (snap.tv_norm() > diag.mass_radius * (1.0 + 1e-9))
        diag.radius_respected = false;
    if (res <= cfg.tol_fp) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw NonConvergenceError(
        "outer fixed-point iteration did not converge within " +
            std::to_string(cfg.max_iterations) + " iterations",
        diag.outer_residuals);
  return {std::move(current), std::move(diag)};
}

StabilityReport stability_experiment(const ModelFunctions& model_a,
                                     const ModelFunctions& model_b,
                                     const AtomicMeasure& mu0,
                                     const SolverConfig& cfg,
                                     int sample_budget,
                                     unsigned long long seed) {
  NonlinearResult a = solve_nonlinear(mu0, model_a, cfg);
  NonlinearResult b = solve_nonlinear(mu0, model_b, cfg);

  StabilityReport report;
  report.model_constant = std::max(model_constant(model_a, cfg.t_end),
                                   model_constant(model_b, cfg.t_end));
  report.sup_flat_distance = sup_flat_distance(a.path, b.path);

  // Sampled sups: states drawn at random plus the solution supports;
  // measure arguments drawn from both solution paths.
  Rng rng(seed);
  const auto& grid = a.path.grid();
  double int_eta = 0.0, int_influx = 0.0, int_growth = 0.0, sup_flow = 0.0;
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    const double t = grid[k];
    const double dt = grid[k + 1] - grid[k];
    std::vector<Point> states;
    for (const auto& atom : a.path.at(k).atoms()) states.push_back(atom.location);
    for (const auto& atom : b.path.at(k).atoms()) states.push_back(atom.location);
    for (int s = 0; s < sample_budget; ++s)
      states.push_back(sample_point(*model_a.space, rng, 5.0));

    const AtomicMeasure* margs[2] = {&a.path.at(k), &b.path.at(k)};
    double eta_gap = 0.0, growth_gap = 0.0, influx_gap = 0.0;
    for (const AtomicMeasure* m : margs) {
      influx_gap = std::max(
          influx_gap, flat_distance(model_a.influx.value(t, m),
                                    model_b.influx.value(t, m)));
      for (const auto& x : states) {
        eta_gap = std::max(eta_gap, flat_distance(model_a.kernel.value(t, x, m),
                                                  model_b.kernel.value(t, x, m)));
        growth_gap =
            std::max(growth_gap, std::fabs(model_a.growth.value(t, x, m) -
                                           model_b.growth.value(t, x, m)));
      }
    }
    int_eta += dt * eta_gap;
    int_influx += dt * influx_gap;
    int_growth += dt * growth_gap;

    for (const auto& x : states) {
      const double tau = grid[k / 2];
      sup_flow = std::max(sup_flow, model_a.space->distance(
                                        model_a.flow.at(t, tau, x, &a.path),
                                        model_b.flow.at(t, tau, x, &a.path)));
    }
  }
  report.surrogate_bound =
      report.model_constant * (int_eta + int_influx + int_growth + sup_flow);
  report.ratio = report.surrogate_bound > 0.0
                     ? report.sup_flat_distance / report.surrogate_bound
                     : (report.sup_flat_distance > 0.0
                            ? std::numeric_limits<double>::infinity()
                            : 0.0);
  return report;
}

}  // namespace flatpop
