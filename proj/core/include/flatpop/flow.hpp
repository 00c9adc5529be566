#pragma once

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "flatpop/measure.hpp"
#include "flatpop/metric_space.hpp"

namespace flatpop {

/// Vector field b(t, x, mu) on a Euclidean backend, with the declared
/// bounds the solver constants are computed from. `mu` is the frozen
/// snapshot at time t and may be null for measure-independent fields.
struct VectorField {
  std::function<std::vector<double>(double t, const std::vector<double>& x,
                                    const AtomicMeasure* mu)>
      velocity;
  std::function<double(double t)> sup_bound;  // bound on ||b(t,.,mu)||
  std::function<double(double t)> lip_bound;  // bound on |b(t,.,mu)|_Lip
  double measure_lipschitz = 0.0;             // L_{R,b}
};

/// Two-parameter family of (bi-)Lipschitz maps X(t, tau, .) generalizing
/// vector-field characteristics: X(tau, tau, .) = id, cocycle in time, and
/// d(X(t,tau,x), X(t,tau,y)) <= lipschitz_bound(t - tau) d(x, y). The
/// inverse is the family at swapped time arguments. Evaluation is pure
/// given an immutable frozen path.
class FlowMap {
 public:
  using Eval =
      std::function<Point(double t, double tau, const Point& x,
                          const MeasurePath* frozen)>;
  using Bound = std::function<double(double dt)>;

  FlowMap() = default;
  FlowMap(Eval forward, Bound lipschitz, Bound modulus, bool invertible = true)
      : forward_(std::move(forward)),
        lipschitz_(std::move(lipschitz)),
        modulus_(std::move(modulus)),
        invertible_(invertible) {}

  Point at(double t, double tau, const Point& x,
           const MeasurePath* frozen = nullptr) const {
    return forward_(t, tau, x, frozen);
  }
  /// X^{-1}(t, tau, .) = X(tau, t, .).
  Point inverse_at(double t, double tau, const Point& x,
                   const MeasurePath* frozen = nullptr) const {
    return forward_(tau, t, x, frozen);
  }

  double lipschitz_bound(double dt) const { return lipschitz_(dt); }
  double modulus(double dt) const { return modulus_(dt); }
  /// False for flows that are only homeomorphisms onto their image
  /// (absorbing graph drift); invertibility checks are skipped there.
  bool invertible() const { return invertible_; }
  bool valid() const { return static_cast<bool>(forward_); }

 private:
  Eval forward_;
  Bound lipschitz_;
  Bound modulus_;
  bool invertible_ = true;
};

/// Identity on any space.
FlowMap identity_flow();

/// Constant-speed rotation on a circle space: the angle advances by
/// omega * (t - tau).
FlowMap rotation_flow(SpacePtr space, double omega);

enum class VertexPolicy { Absorb, Route };

/// Constant-speed drift along graph edges (in the direction of each
/// edge's second endpoint). Mass reaching a vertex either stops there
/// (Absorb) or continues along routing[vertex], which must be an edge
/// whose first endpoint is that vertex. Under Route, every vertex of
/// degree > 1 needs a routing entry; degree-1 vertices absorb. Backward
/// motion absorbs at the current edge's first endpoint.
FlowMap graph_drift_flow(SpacePtr space, double speed, VertexPolicy policy,
                         std::map<int, int> routing = {});

/// Componentwise shift on a trajectory space with Euclidean target: every
/// sample moves by velocity * (t - tau).
FlowMap shift_flow(SpacePtr space, std::vector<double> velocity);

/// Rotation whose angular speed decays with the instantaneous total mass
/// of the frozen path: omega / (1 + slowdown * mass(mu_s)), integrated
/// exactly over the path's piecewise-constant mass. An isometry for every
/// frozen path; the measure-Lipschitz rate is |omega| * slowdown.
FlowMap density_rotation_flow(SpacePtr space, double omega, double slowdown);

/// Characteristic flow of an ODE on a Euclidean backend, integrated by the
/// classic 4th-order one-step scheme with fixed substep
/// 1 / substeps_per_unit. The measure argument along the way is the frozen
/// path's snapshot at the last grid time <= s. The inverse integrates
/// backward with the same scheme.
FlowMap ode_flow(SpacePtr space, VectorField field, int substeps_per_unit);

/// max over samples of d(X(t2,tau,x), X(t2,t1,X(t1,tau,x))).
double cocycle_residual(const FlowMap& flow, const MetricSpace& space,
                        double t2, double t1, double tau,
                        const std::vector<Point>& samples,
                        const MeasurePath* frozen = nullptr);

/// max over pairs of d(X(t,tau,x1), X(t,tau,x2)) / d(x1, x2); pairs at zero
/// distance are skipped.
double empirical_lipschitz(const FlowMap& flow, const MetricSpace& space,
                           double t, double tau,
                           const std::vector<std::pair<Point, Point>>& pairs,
                           const MeasurePath* frozen = nullptr);

}  // namespace flatpop
