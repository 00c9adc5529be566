#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "flatpop/flow.hpp"
#include "flatpop/measure.hpp"

namespace flatpop {

/// Per-state growth/decay rate c(t, x, mu) with declared bounds. The
/// measure argument is null in the linear setting and the frozen snapshot
/// at time t otherwise. Declared bounds are trusted inputs, spot-checked
/// by validate_assumptions.
struct GrowthTerm {
  std::function<double(double t, const Point& x, const AtomicMeasure* mu)> value;
  std::function<double(double t)> sup_bound;
  std::function<double(double t)> lip_bound;
  std::function<double(double t)> measure_lip;  // L_{R,c}
};

/// State-indexed redistribution kernel eta(t, x, mu) valued in
/// nonnegative atomic measures.
struct HeterogeneityKernel {
  std::function<AtomicMeasure(double t, const Point& x, const AtomicMeasure* mu)>
      value;
  std::function<double(double t)> mass_bound;  // sup_x of eta's total mass
  std::function<double(double t)> lip_bound;   // Lip in x wrt the flat metric
  std::function<double(double t)> measure_lip;  // L_{R,eta}
  /// max of the mass and Lipschitz bounds: the Bielecki weight function.
  double bl_bound(double t) const;
};

/// State-independent source N(t, mu).
struct InfluxTerm {
  std::function<AtomicMeasure(double t, const AtomicMeasure* mu)> value;
  std::function<double(double t)> mass_bound;
  std::function<double(double t)> measure_lip;  // L_{R,N}
};

/// The model tuple (c, eta, N, X) on one space. `field` is set when the
/// flow is generated by an ODE on a Euclidean backend, which is what the
/// PDE-consistency checks differentiate against.
struct ModelFunctions {
  SpacePtr space;
  GrowthTerm growth;
  HeterogeneityKernel kernel;
  InfluxTerm influx;
  FlowMap flow;
  std::optional<VectorField> field;
  double flow_measure_lip = 0.0;  // L_{R,X}
  bool measure_dependent = false;
};

GrowthTerm zero_growth();
GrowthTerm constant_growth(double rate);
/// c(t, x, mu) = r (1 - mu(S)/K); bounds declared on the mass ball of
/// radius mass_radius.
GrowthTerm logistic_growth(double r, double K, double mass_radius);

HeterogeneityKernel zero_kernel(SpacePtr space);
/// eta(t, x) = rate * dirac(jump(x)); jump_lipschitz is the declared
/// Lipschitz constant of the jump map (0 for constant jumps).
HeterogeneityKernel point_jump_kernel(SpacePtr space, double rate,
                                      std::function<Point(const Point&)> jump,
                                      double jump_lipschitz);

InfluxTerm zero_influx(SpacePtr space);
InfluxTerm point_influx(SpacePtr space, double rate, Point source);

struct ValidationConfig {
  int samples = 200;
  unsigned long long seed = 42;
  double t_end = 1.0;
  double point_radius = 5.0;  // sampling box for unbounded backends
  double mass_cap = 4.0;      // mass scale of sampled measure arguments
};

struct ValidationReport {
  struct Item {
    std::string component;
    double max_ratio = 0.0;  // observed / declared
  };
  std::vector<Item> items;
  /// Invalid once any observed value exceeds its declared bound by more
  /// than the 1e-6 relative slack.
  bool valid() const;
  double worst_ratio() const;
};

/// Monte-Carlo spot check that sampled values of the model functions
/// respect their declared bounds. Deterministic given the seed.
ValidationReport validate_assumptions(const ModelFunctions& model,
                                      const ValidationConfig& cfg);

/// sup over 0 <= tau <= t <= t_end of
///   exp(int_0^T ||c||_inf) [ L_X(t - tau) + int_tau^t |c|_Lip L_X(s - tau) ds ]
/// evaluated from the declared bounds with an upper-Riemann rule on
/// `resolution` subintervals. Monotone nondecreasing in t_end and in every
/// declared bound.
double solver_constant(const ModelFunctions& model, double t_end,
                       int resolution = 256);

/// Gronwall bound on the total mass over [0, t_end] from the declared
/// bounds (the a-priori estimate the nonlinear radius is derived from).
double apriori_mass_bound(const ModelFunctions& model, double initial_mass,
                          double t_end, int resolution = 1024);

}  // namespace flatpop
