#include "flatpop/pde_consistency.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "flatpop/nonlinear_solver.hpp"

namespace flatpop {

namespace {

double radial_norm(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

// C^1 radial bump: 1 on [0, inner], cosine taper to 0 at outer.
double bump(double r, double inner, double outer) {
  if (r <= inner) return 1.0;
  if (r >= outer) return 0.0;
  const double u = (r - inner) / (outer - inner);
  return 0.5 * (1.0 + std::cos(std::numbers::pi * u));
}

double bump_derivative(double r, double inner, double outer) {
  if (r <= inner || r >= outer) return 0.0;
  const double u = (r - inner) / (outer - inner);
  return -0.5 * std::numbers::pi * std::sin(std::numbers::pi * u) /
         (outer - inner);
}

const std::vector<double>& euclid_coords(const Point& p) {
  return std::get<EuclideanPoint>(p.payload).coords;
}

}  // namespace

double TestFunction::spatial(const std::vector<double>& x) const {
  return psi(x) * bump(radial_norm(x), cutoff_inner, cutoff_outer);
}

std::vector<double> TestFunction::spatial_gradient(
    const std::vector<double>& x) const {
  const double r = radial_norm(x);
  const double b = bump(r, cutoff_inner, cutoff_outer);
  const double db = bump_derivative(r, cutoff_inner, cutoff_outer);
  std::vector<double> g = grad_psi(x);
  const double p = psi(x);
  for (std::size_t i = 0; i < g.size(); ++i) {
    double radial = 0.0;
    if (db != 0.0 && r > 0.0) radial = p * db * x[i] / r;
    g[i] = g[i] * b + radial;
  }
  return g;
}

std::vector<TestFunction> canonical_test_functions() {
  auto one = [](double) { return 1.0; };
  auto zero = [](double) { return 0.0; };
  std::vector<TestFunction> out;
  out.push_back({"constant",
                 one,
                 zero,
                 [](const std::vector<double>&) { return 1.0; },
                 [](const std::vector<double>& x) {
                   return std::vector<double>(x.size(), 0.0);
                 }});
  out.push_back({"coordinate",
                 one,
                 zero,
                 [](const std::vector<double>& x) { return x[0]; },
                 [](const std::vector<double>& x) {
                   std::vector<double> g(x.size(), 0.0);
                   g[0] = 1.0;
                   return g;
                 }});
  out.push_back({"quadratic",
                 one,
                 zero,
                 [](const std::vector<double>& x) { return x[0] * x[0]; },
                 [](const std::vector<double>& x) {
                   std::vector<double> g(x.size(), 0.0);
                   g[0] = 2.0 * x[0];
                   return g;
                 }});
  out.push_back({"sine",
                 one,
                 zero,
                 [](const std::vector<double>& x) { return std::sin(x[0]); },
                 [](const std::vector<double>& x) {
                   std::vector<double> g(x.size(), 0.0);
                   g[0] = std::cos(x[0]);
                   return g;
                 }});
  out.push_back({"gauss_ramp",
                 [](double t) { return 1.0 + 0.5 * t; },
                 [](double) { return 0.5; },
                 [](const std::vector<double>& x) {
                   return std::exp(-x[0] * x[0]);
                 },
                 [](const std::vector<double>& x) {
                   std::vector<double> g(x.size(), 0.0);
                   g[0] = -2.0 * x[0] * std::exp(-x[0] * x[0]);
                   return g;
                 }});
  out.push_back({"cos_wave",
                 [](double t) { return std::cos(t); },
                 [](double t) { return -std::sin(t); },
                 [](const std::vector<double>& x) { return std::cos(x[0]); },
                 [](const std::vector<double>& x) {
                   std::vector<double> g(x.size(), 0.0);
                   g[0] = -std::sin(x[0]);
                   return g;
                 }});
  return out;
}

namespace {

struct BalanceTerms {
  double transport = 0.0;  // int grad psi . b dmu
  double growth = 0.0;     // int psi c dmu
  double kernel = 0.0;     // int int psi d(eta) dmu
  double influx = 0.0;     // int psi dN
};

BalanceTerms balance_at(const MeasurePath& path, const ModelFunctions& model,
                        const TestFunction& tf, double t,
                        const AtomicMeasure& mu) {
  if (model.space->kind() != SpaceKind::Euclidean)
    throw std::invalid_argument("consistency checks need a Euclidean backend");
  if (!model.field)
    throw std::invalid_argument("consistency checks need a vector-field flow");
  const AtomicMeasure* marg = model.measure_dependent ? &mu : nullptr;

  BalanceTerms out;
  for (const auto& atom : mu.atoms()) {
    const auto& x = euclid_coords(atom.location);
    const std::vector<double> b = model.field->velocity(t, x, marg);
    const std::vector<double> g = tf.spatial_gradient(x);
    double dot = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) dot += g[i] * b[i];
    out.transport += atom.weight * dot;
    out.growth +=
        atom.weight * tf.spatial(x) * model.growth.value(t, atom.location, marg);
    const AtomicMeasure emitted = model.kernel.value(t, atom.location, marg);
    for (const auto& e : emitted.atoms())
      out.kernel += atom.weight * e.weight * tf.spatial(euclid_coords(e.location));
  }
  const AtomicMeasure inflow = model.influx.value(t, marg);
  for (const auto& e : inflow.atoms())
    out.influx += e.weight * tf.spatial(euclid_coords(e.location));
  (void)path;
  return out;
}

double integrate_spatial(const TestFunction& tf, const AtomicMeasure& mu) {
  double s = 0.0;
  for (const auto& atom : mu.atoms())
    s += atom.weight * tf.spatial(euclid_coords(atom.location));
  return s;
}

}  // namespace

double weak_residual(const MeasurePath& path, const ModelFunctions& model,
                     const TestFunction& tf) {
  const auto& grid = path.grid();
  const double T = grid.back();
  const double lhs = tf.phi(T) * integrate_spatial(tf, path.at(grid.size() - 1)) -
                     tf.phi(0.0) * integrate_spatial(tf, path.at(0));
  double rhs = 0.0;
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    const double t = grid[k];
    const double dt = grid[k + 1] - grid[k];
    const AtomicMeasure& mu = path.at(k);
    const BalanceTerms terms = balance_at(path, model, tf, t, mu);
    rhs += dt * (tf.dphi(t) * integrate_spatial(tf, mu) +
                 tf.phi(t) * (terms.transport + terms.growth + terms.kernel +
                              terms.influx));
  }
  return lhs - rhs;
}

DerivativePair derivative_check(const MeasurePath& path,
                                const ModelFunctions& model,
                                const TestFunction& tf, std::size_t k) {
  const auto& grid = path.grid();
  if (k == 0 || k + 1 >= grid.size())
    throw std::invalid_argument("derivative check needs an interior grid node");
  DerivativePair pair;
  pair.lhs = (integrate_spatial(tf, path.at(k + 1)) -
              integrate_spatial(tf, path.at(k - 1))) /
             (grid[k + 1] - grid[k - 1]);
  const BalanceTerms terms = balance_at(path, model, tf, grid[k], path.at(k));
  pair.rhs = terms.transport + terms.growth + terms.kernel + terms.influx;
  return pair;
}

SplitCheck split_check(const AtomicMeasure& mu0, const ModelFunctions& model,
                       const SolverConfig& cfg, const TestFunction& tf,
                       std::size_t k) {
  SolverConfig raw = cfg;
  raw.merge_radius = 0.0;
  raw.weight_floor = 0.0;
  const std::vector<double> grid = solver_grid(raw);
  if (k >= grid.size())
    throw std::invalid_argument("grid node out of range");

  SolveResult solved = solve_linear(mu0, model, raw);
  OperatorTerms terms = assemble_operator_terms(mu0, solved.path, model, raw);
  const double t = grid[k];

  auto transport_part = [&](const AtomicMeasure& mu) {
    return balance_at(solved.path, model, tf, t, mu).transport;
  };
  auto growth_part = [&](const AtomicMeasure& mu) {
    return balance_at(solved.path, model, tf, t, mu).growth;
  };

  SplitCheck out;
  out.transport_by_terms = transport_part(terms.initial[k]) +
                           transport_part(terms.kernel[k]) +
                           transport_part(terms.influx[k]);
  out.growth_by_terms = growth_part(terms.initial[k]) +
                        growth_part(terms.kernel[k]) +
                        growth_part(terms.influx[k]);
  const AtomicMeasure combined =
      add(add(terms.initial[k], terms.kernel[k]), terms.influx[k]);
  out.transport_combined = transport_part(combined);
  out.growth_combined = growth_part(combined);
  return out;
}

double fit_order(const std::vector<double>& dts,
                 const std::vector<double>& residuals) {
  if (dts.size() != residuals.size() || dts.size() < 2)
    throw std::invalid_argument("order fit needs matched samples, >= 2");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(dts.size());
  for (std::size_t i = 0; i < dts.size(); ++i) {
    const double x = std::log(dts[i]);
    const double y = std::log(std::max(std::fabs(residuals[i]), 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ConsistencyReport consistency_report(const AtomicMeasure& mu0,
                                     const ModelFunctions& model,
                                     const SolverConfig& base_cfg,
                                     const std::vector<double>& dts) {
  ConsistencyReport report;
  const auto tfs = canonical_test_functions();
  report.cutoff_inner = tfs.front().cutoff_inner;
  report.cutoff_outer = tfs.front().cutoff_outer;
  std::vector<std::vector<double>> residuals(tfs.size());
  for (double dt : dts) {
    SolverConfig cfg = base_cfg;
    cfg.dt = dt;
    cfg.merge_radius = 0.0;
    cfg.weight_floor = 0.0;
    NonlinearResult solved = solve_nonlinear(mu0, model, cfg);
    for (std::size_t i = 0; i < tfs.size(); ++i)
      residuals[i].push_back(weak_residual(solved.path, model, tfs[i]));
  }
  for (std::size_t i = 0; i < tfs.size(); ++i) {
    ConsistencyEntry entry;
    entry.test_function = tfs[i].name;
    entry.dts = dts;
    entry.residuals = residuals[i];
    entry.order = fit_order(dts, residuals[i]);
    report.entries.push_back(std::move(entry));
  }
  return report;
}

}  // namespace flatpop
