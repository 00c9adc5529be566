#include "flatpop/flow.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace flatpop {

FlowMap identity_flow() {
  return FlowMap(
      [](double, double, const Point& x, const MeasurePath*) { return x; },
      [](double) { return 1.0; }, [](double) { return 0.0; });
}

FlowMap rotation_flow(SpacePtr space, double omega) {
  const double arc_per_angle =
      space->as_circle().circumference / (2.0 * std::numbers::pi);
  return FlowMap(
      [omega](double t, double tau, const Point& x, const MeasurePath*) {
        const auto& c = std::get<CirclePoint>(x.payload);
        return Point::circle(c.angle + omega * (t - tau));
      },
      [](double) { return 1.0; },
      [omega, arc_per_angle](double r) {
        return std::fabs(omega) * arc_per_angle * std::fabs(r);
      });
}

FlowMap graph_drift_flow(SpacePtr space, double speed, VertexPolicy policy,
                         std::map<int, int> routing) {
  const auto& gr = space->as_graph();
  std::vector<int> degree(gr.vertex_count, 0);
  for (const auto& e : gr.edges) {
    ++degree[e.u];
    ++degree[e.v];
  }
  for (auto [vertex, edge] : routing) {
    if (edge < 0 || edge >= static_cast<int>(gr.edges.size()))
      throw std::invalid_argument("routing entry names an unknown edge");
    if (gr.edges[edge].u != vertex)
      throw std::invalid_argument(
          "routed edge must start at the junction vertex");
  }
  if (policy == VertexPolicy::Route) {
    for (int v = 0; v < gr.vertex_count; ++v)
      if (degree[v] > 1 && !routing.count(v))
        throw std::invalid_argument("routing missing at vertex of degree > 1");
  }

  auto forward = [space, speed, policy, routing](double t, double tau,
                                                 const Point& x,
                                                 const MeasurePath*) {
    const auto& gr = space->as_graph();
    auto gp = std::get<GraphPoint>(x.payload);
    double remaining = speed * (t - tau);
    if (remaining < 0.0) {  // backward motion absorbs at the first endpoint
      gp.offset = std::max(0.0, gp.offset + remaining);
      return Point{gp};
    }
    for (;;) {
      const double room = gr.edges[gp.edge].length - gp.offset;
      if (remaining <= room) {
        gp.offset += remaining;
        return Point{gp};
      }
      const int vertex = gr.edges[gp.edge].v;
      auto it = routing.find(vertex);
      if (policy == VertexPolicy::Absorb || it == routing.end()) {
        gp.offset = gr.edges[gp.edge].length;
        return Point{gp};
      }
      remaining -= room;
      gp.edge = it->second;
      gp.offset = 0.0;
    }
  };
  const bool invertible = false;  // absorption is not invertible
  return FlowMap(std::move(forward), [](double) { return 1.0; },
                 [speed](double r) { return std::fabs(speed) * std::fabs(r); },
                 invertible);
}

FlowMap shift_flow(SpacePtr space, std::vector<double> velocity) {
  const auto& tr = space->as_trajectory();
  if (!std::holds_alternative<MetricSpace::Euclidean>(tr.target))
    throw std::invalid_argument("shift flow needs a Euclidean target");
  const int dim = space->trajectory_sample_dim();
  if (static_cast<int>(velocity.size()) != dim)
    throw std::invalid_argument("shift velocity dimension mismatch");
  double vnorm = 0.0;
  for (double v : velocity) vnorm += v * v;
  vnorm = std::sqrt(vnorm);
  return FlowMap(
      [velocity, dim](double t, double tau, const Point& x, const MeasurePath*) {
        auto tp = std::get<TrajectoryPoint>(x.payload);
        for (std::size_t i = 0; i < tp.samples.size(); ++i)
          tp.samples[i] += velocity[i % dim] * (t - tau);
        return Point{std::move(tp)};
      },
      [](double) { return 1.0; },
      [vnorm](double r) { return vnorm * std::fabs(r); });
}

FlowMap density_rotation_flow(SpacePtr space, double omega, double slowdown) {
  const double arc_per_angle =
      space->as_circle().circumference / (2.0 * std::numbers::pi);
  // Integral of 1/(1 + slowdown * mass(p_s)) over [tau, t]; the frozen
  // path's mass is piecewise constant, so each grid interval contributes
  // exactly. Additive in time, which is what the cocycle property needs.
  auto effective_time = [slowdown](double tau, double t, const MeasurePath* p) {
    if (!p) return t - tau;
    const double sign = t >= tau ? 1.0 : -1.0;
    const double lo = std::min(tau, t), hi = std::max(tau, t);
    const auto& grid = p->grid();
    auto rate = [&](std::size_t k) {
      return 1.0 / (1.0 + slowdown * p->at(k).tv_norm());
    };
    double acc = 0.0;
    if (lo < grid.front())
      acc += (std::min(hi, grid.front()) - lo) * rate(0);
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
      const double seg_lo = std::max(lo, grid[k]);
      const double seg_hi = std::min(hi, grid[k + 1]);
      if (seg_hi > seg_lo) acc += (seg_hi - seg_lo) * rate(k);
    }
    if (hi > grid.back())
      acc += (hi - std::max(lo, grid.back())) * rate(grid.size() - 1);
    return sign * acc;
  };
  return FlowMap(
      [omega, effective_time](double t, double tau, const Point& x,
                              const MeasurePath* frozen) {
        const auto& c = std::get<CirclePoint>(x.payload);
        return Point::circle(c.angle + omega * effective_time(tau, t, frozen));
      },
      [](double) { return 1.0; },
      [omega, arc_per_angle](double r) {
        return std::fabs(omega) * arc_per_angle * std::fabs(r);
      });
}

namespace {

std::vector<double> rk4_integrate(const VectorField& field, double t0,
                                  double t1, std::vector<double> x,
                                  int substeps_per_unit,
                                  const MeasurePath* frozen) {
  const double span = t1 - t0;
  if (span == 0.0) return x;
  const int steps =
      std::max(1, static_cast<int>(std::ceil(std::fabs(span) * substeps_per_unit)));
  const double h = span / steps;
  const std::size_t d = x.size();
  std::vector<double> k1(d), k2(d), k3(d), k4(d), tmp(d);
  auto eval = [&](double s, const std::vector<double>& y, std::vector<double>& out) {
    const AtomicMeasure* mu = frozen ? &frozen->at_time(s) : nullptr;
    out = field.velocity(s, y, mu);
    if (out.size() != d) throw std::invalid_argument("vector field dimension mismatch");
  };
  double s = t0;
  for (int step = 0; step < steps; ++step) {
    eval(s, x, k1);
    for (std::size_t i = 0; i < d; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
    eval(s + 0.5 * h, tmp, k2);
    for (std::size_t i = 0; i < d; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
    eval(s + 0.5 * h, tmp, k3);
    for (std::size_t i = 0; i < d; ++i) tmp[i] = x[i] + h * k3[i];
    eval(s + h, tmp, k4);
    for (std::size_t i = 0; i < d; ++i)
      x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    s = t0 + (step + 1) * h;
  }
  return x;
}

}  // namespace

FlowMap ode_flow(SpacePtr space, VectorField field, int substeps_per_unit) {
  if (space->kind() != SpaceKind::Euclidean)
    throw std::invalid_argument("ode flow supports Euclidean backends only");
  if (substeps_per_unit < 1)
    throw std::invalid_argument("substeps_per_unit must be >= 1");
  std::function<double(double)> lip = field.lip_bound;
  if (!lip) lip = [](double) { return 0.0; };
  std::function<double(double)> sup = field.sup_bound;
  if (!sup) sup = [](double) { return 0.0; };
  // Gronwall bound with the declared Lipschitz rate at time 0; tight for
  // autonomous fields.
  const double lip_at_zero = lip(0.0);
  return FlowMap(
      [field, substeps_per_unit](double t, double tau, const Point& x,
                                 const MeasurePath* frozen) {
        const auto& e = std::get<EuclideanPoint>(x.payload);
        return Point::euclidean(
            rk4_integrate(field, tau, t, e.coords, substeps_per_unit, frozen));
      },
      [lip_at_zero](double dt) { return std::exp(lip_at_zero * std::fabs(dt)); },
      [sup](double r) { return sup(0.0) * std::fabs(r); });
}

double cocycle_residual(const FlowMap& flow, const MetricSpace& space,
                        double t2, double t1, double tau,
                        const std::vector<Point>& samples,
                        const MeasurePath* frozen) {
  double worst = 0.0;
  for (const auto& x : samples) {
    const Point direct = flow.at(t2, tau, x, frozen);
    const Point composed = flow.at(t2, t1, flow.at(t1, tau, x, frozen), frozen);
    worst = std::max(worst, space.distance(direct, composed));
  }
  return worst;
}

double empirical_lipschitz(const FlowMap& flow, const MetricSpace& space,
                           double t, double tau,
                           const std::vector<std::pair<Point, Point>>& pairs,
                           const MeasurePath* frozen) {
  double worst = 0.0;
  for (const auto& [a, b] : pairs) {
    const double d0 = space.distance(a, b);
    if (d0 == 0.0) continue;
    const double d1 =
        space.distance(flow.at(t, tau, a, frozen), flow.at(t, tau, b, frozen));
    worst = std::max(worst, d1 / d0);
  }
  return worst;
}

}  // namespace flatpop
