#include "flatpop/metric_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace flatpop {

Point Point::euclidean(std::vector<double> coords) {
  return Point{EuclideanPoint{std::move(coords)}};
}

Point Point::circle(double angle) { return Point{CirclePoint{wrap_angle(angle)}}; }

Point Point::graph(int edge, double offset) {
  return Point{GraphPoint{edge, offset}};
}

Point Point::discrete(int index) { return Point{DiscretePoint{index}}; }

Point Point::trajectory(std::vector<double> samples) {
  return Point{TrajectoryPoint{std::move(samples)}};
}

bool same_point(const Point& a, const Point& b) {
  if (a.payload.index() != b.payload.index()) return false;
  return std::visit(
      [&](const auto& pa) {
        using T = std::decay_t<decltype(pa)>;
        const auto& pb = std::get<T>(b.payload);
        if constexpr (std::is_same_v<T, EuclideanPoint>) {
          return pa.coords == pb.coords;
        } else if constexpr (std::is_same_v<T, CirclePoint>) {
          return pa.angle == pb.angle;
        } else if constexpr (std::is_same_v<T, GraphPoint>) {
          return pa.edge == pb.edge && pa.offset == pb.offset;
        } else if constexpr (std::is_same_v<T, DiscretePoint>) {
          return pa.index == pb.index;
        } else {
          return pa.samples == pb.samples;
        }
      },
      a.payload);
}

double wrap_angle(double angle) {
  const double two_pi = 2.0 * std::numbers::pi;
  double a = std::fmod(angle, two_pi);
  if (a < 0.0) a += two_pi;
  if (a >= two_pi) a = 0.0;  // fmod rounding can land exactly on 2*pi
  return a;
}

SpacePtr MetricSpace::euclidean(int dimension) {
  if (dimension < 1) throw std::invalid_argument("euclidean dimension must be >= 1");
  return SpacePtr(new MetricSpace(Euclidean{dimension}));
}

SpacePtr MetricSpace::circle(double circumference) {
  if (!(circumference > 0.0))
    throw std::invalid_argument("circle circumference must be positive");
  return SpacePtr(new MetricSpace(Circle{circumference}));
}

SpacePtr MetricSpace::discrete(int count, double spacing) {
  if (count < 1) throw std::invalid_argument("discrete space needs >= 1 point");
  if (!(spacing > 0.0)) throw std::invalid_argument("discrete spacing must be positive");
  return SpacePtr(new MetricSpace(Discrete{count, spacing}));
}

SpacePtr MetricSpace::graph(int vertex_count, std::vector<GraphEdge> edges) {
  if (vertex_count < 1) throw std::invalid_argument("graph needs >= 1 vertex");
  for (const auto& e : edges) {
    if (e.u < 0 || e.u >= vertex_count || e.v < 0 || e.v >= vertex_count)
      throw std::invalid_argument("graph edge endpoint out of range");
    if (!(e.length > 0.0))
      throw std::invalid_argument("graph edge length must be positive");
  }
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> dist(
      vertex_count, std::vector<double>(vertex_count, inf));
  for (int i = 0; i < vertex_count; ++i) dist[i][i] = 0.0;
  for (const auto& e : edges) {
    dist[e.u][e.v] = std::min(dist[e.u][e.v], e.length);
    dist[e.v][e.u] = std::min(dist[e.v][e.u], e.length);
  }
  for (int k = 0; k < vertex_count; ++k)
    for (int i = 0; i < vertex_count; ++i)
      for (int j = 0; j < vertex_count; ++j)
        dist[i][j] = std::min(dist[i][j], dist[i][k] + dist[k][j]);
  for (int i = 0; i < vertex_count; ++i)
    for (int j = 0; j < vertex_count; ++j)
      if (!(dist[i][j] < inf))
        throw std::invalid_argument(
            "graph must be connected (vertex " + std::to_string(i) +
            " unreachable from " + std::to_string(j) + ")");
  return SpacePtr(new MetricSpace(Graph{vertex_count, std::move(edges), std::move(dist)}));
}

SpacePtr MetricSpace::trajectory(std::vector<double> grid,
                                 std::variant<Euclidean, Discrete> target) {
  if (grid.empty()) throw std::invalid_argument("trajectory grid must be nonempty");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1]))
      throw std::invalid_argument("trajectory grid must be strictly increasing");
  return SpacePtr(new MetricSpace(Trajectory{std::move(grid), target}));
}

SpaceKind MetricSpace::kind() const {
  switch (backend_.index()) {
    case 0: return SpaceKind::Euclidean;
    case 1: return SpaceKind::Circle;
    case 2: return SpaceKind::Discrete;
    case 3: return SpaceKind::Graph;
    default: return SpaceKind::Trajectory;
  }
}

const MetricSpace::Euclidean& MetricSpace::as_euclidean() const {
  if (!std::holds_alternative<Euclidean>(backend_))
    throw std::invalid_argument("space is not Euclidean");
  return std::get<Euclidean>(backend_);
}
const MetricSpace::Circle& MetricSpace::as_circle() const {
  if (!std::holds_alternative<Circle>(backend_))
    throw std::invalid_argument("space is not a circle");
  return std::get<Circle>(backend_);
}
const MetricSpace::Discrete& MetricSpace::as_discrete() const {
  if (!std::holds_alternative<Discrete>(backend_))
    throw std::invalid_argument("space is not discrete");
  return std::get<Discrete>(backend_);
}
const MetricSpace::Graph& MetricSpace::as_graph() const {
  if (!std::holds_alternative<Graph>(backend_))
    throw std::invalid_argument("space is not a graph");
  return std::get<Graph>(backend_);
}
const MetricSpace::Trajectory& MetricSpace::as_trajectory() const {
  if (!std::holds_alternative<Trajectory>(backend_))
    throw std::invalid_argument("space is not a trajectory space");
  return std::get<Trajectory>(backend_);
}

bool MetricSpace::contains(const Point& p) const {
  switch (kind()) {
    case SpaceKind::Euclidean: {
      const auto* e = std::get_if<EuclideanPoint>(&p.payload);
      return e && static_cast<int>(e->coords.size()) == as_euclidean().dimension;
    }
    case SpaceKind::Circle: {
      const auto* c = std::get_if<CirclePoint>(&p.payload);
      return c && c->angle >= 0.0 && c->angle < 2.0 * std::numbers::pi;
    }
    case SpaceKind::Discrete: {
      const auto* d = std::get_if<DiscretePoint>(&p.payload);
      return d && d->index >= 0 && d->index < as_discrete().count;
    }
    case SpaceKind::Graph: {
      const auto* g = std::get_if<GraphPoint>(&p.payload);
      if (!g) return false;
      const auto& gr = as_graph();
      if (g->edge < 0 || g->edge >= static_cast<int>(gr.edges.size())) return false;
      return g->offset >= 0.0 && g->offset <= gr.edges[g->edge].length;
    }
    case SpaceKind::Trajectory: {
      const auto* t = std::get_if<TrajectoryPoint>(&p.payload);
      if (!t) return false;
      return t->samples.size() ==
             as_trajectory().grid.size() *
                 static_cast<std::size_t>(trajectory_sample_dim());
    }
  }
  return false;
}

int MetricSpace::trajectory_sample_dim() const {
  const auto& t = as_trajectory();
  if (std::holds_alternative<Euclidean>(t.target))
    return std::get<Euclidean>(t.target).dimension;
  return 1;
}

namespace {

double euclid_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace

double MetricSpace::distance(const Point& x, const Point& y) const {
  switch (kind()) {
    case SpaceKind::Euclidean: {
      const auto* a = std::get_if<EuclideanPoint>(&x.payload);
      const auto* b = std::get_if<EuclideanPoint>(&y.payload);
      if (!a || !b) throw std::invalid_argument("point kind does not match Euclidean space");
      const int dim = as_euclidean().dimension;
      if (static_cast<int>(a->coords.size()) != dim ||
          static_cast<int>(b->coords.size()) != dim)
        throw std::invalid_argument("point dimension does not match space");
      return euclid_dist(a->coords, b->coords);
    }
    case SpaceKind::Circle: {
      const auto* a = std::get_if<CirclePoint>(&x.payload);
      const auto* b = std::get_if<CirclePoint>(&y.payload);
      if (!a || !b) throw std::invalid_argument("point kind does not match circle space");
      const double two_pi = 2.0 * std::numbers::pi;
      const double gap = std::fabs(a->angle - b->angle);
      const double arc = std::min(gap, two_pi - gap);
      return arc * (as_circle().circumference / two_pi);
    }
    case SpaceKind::Discrete: {
      const auto* a = std::get_if<DiscretePoint>(&x.payload);
      const auto* b = std::get_if<DiscretePoint>(&y.payload);
      if (!a || !b) throw std::invalid_argument("point kind does not match discrete space");
      return a->index == b->index ? 0.0 : as_discrete().spacing;
    }
    case SpaceKind::Graph: {
      const auto* a = std::get_if<GraphPoint>(&x.payload);
      const auto* b = std::get_if<GraphPoint>(&y.payload);
      if (!a || !b) throw std::invalid_argument("point kind does not match graph space");
      const auto& gr = as_graph();
      if (!contains(x) || !contains(y))
        throw std::invalid_argument("graph point outside its edge");
      const auto& ea = gr.edges[a->edge];
      const auto& eb = gr.edges[b->edge];
      double best = std::numeric_limits<double>::infinity();
      if (a->edge == b->edge) best = std::fabs(a->offset - b->offset);
      const double ca[2] = {a->offset, ea.length - a->offset};
      const int va[2] = {ea.u, ea.v};
      const double cb[2] = {b->offset, eb.length - b->offset};
      const int vb[2] = {eb.u, eb.v};
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          best = std::min(best, ca[i] + gr.vertex_dist[va[i]][vb[j]] + cb[j]);
      return best;
    }
    case SpaceKind::Trajectory: {
      const auto* a = std::get_if<TrajectoryPoint>(&x.payload);
      const auto* b = std::get_if<TrajectoryPoint>(&y.payload);
      if (!a || !b)
        throw std::invalid_argument("point kind does not match trajectory space");
      const auto& tr = as_trajectory();
      const int dim = trajectory_sample_dim();
      const std::size_t expect = tr.grid.size() * static_cast<std::size_t>(dim);
      if (a->samples.size() != expect || b->samples.size() != expect)
        throw std::invalid_argument("trajectory sample length does not match grid");
      double worst = 0.0;
      if (std::holds_alternative<Euclidean>(tr.target)) {
        for (std::size_t k = 0; k < tr.grid.size(); ++k) {
          double s = 0.0;
          for (int c = 0; c < dim; ++c) {
            const double d = a->samples[k * dim + c] - b->samples[k * dim + c];
            s += d * d;
          }
          worst = std::max(worst, std::sqrt(s));
        }
      } else {
        const double spacing = std::get<Discrete>(tr.target).spacing;
        for (std::size_t k = 0; k < tr.grid.size(); ++k)
          if (a->samples[k] != b->samples[k]) worst = std::max(worst, spacing);
      }
      return worst;
    }
  }
  throw std::logic_error("unreachable backend");
}

Point MetricSpace::vertex_point(int v) const {
  const auto& gr = as_graph();
  if (v < 0 || v >= gr.vertex_count)
    throw std::invalid_argument("vertex index out of range");
  for (std::size_t e = 0; e < gr.edges.size(); ++e) {
    if (gr.edges[e].u == v) return Point::graph(static_cast<int>(e), 0.0);
    if (gr.edges[e].v == v)
      return Point::graph(static_cast<int>(e), gr.edges[e].length);
  }
  throw std::invalid_argument("vertex has no incident edge");
}

bool same_space(const MetricSpace& a, const MetricSpace& b) {
  if (&a == &b) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case SpaceKind::Euclidean:
      return a.as_euclidean().dimension == b.as_euclidean().dimension;
    case SpaceKind::Circle:
      return a.as_circle().circumference == b.as_circle().circumference;
    case SpaceKind::Discrete:
      return a.as_discrete().count == b.as_discrete().count &&
             a.as_discrete().spacing == b.as_discrete().spacing;
    case SpaceKind::Graph: {
      const auto& ga = a.as_graph();
      const auto& gb = b.as_graph();
      if (ga.vertex_count != gb.vertex_count || ga.edges.size() != gb.edges.size())
        return false;
      for (std::size_t i = 0; i < ga.edges.size(); ++i)
        if (ga.edges[i].u != gb.edges[i].u || ga.edges[i].v != gb.edges[i].v ||
            ga.edges[i].length != gb.edges[i].length)
          return false;
      return true;
    }
    case SpaceKind::Trajectory: {
      const auto& ta = a.as_trajectory();
      const auto& tb = b.as_trajectory();
      if (ta.grid != tb.grid) return false;
      if (ta.target.index() != tb.target.index()) return false;
      if (std::holds_alternative<MetricSpace::Euclidean>(ta.target))
        return std::get<MetricSpace::Euclidean>(ta.target).dimension ==
               std::get<MetricSpace::Euclidean>(tb.target).dimension;
      return std::get<MetricSpace::Discrete>(ta.target).count ==
                 std::get<MetricSpace::Discrete>(tb.target).count &&
             std::get<MetricSpace::Discrete>(ta.target).spacing ==
                 std::get<MetricSpace::Discrete>(tb.target).spacing;
    }
  }
  return false;
}

bool same_space(const SpacePtr& a, const SpacePtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return same_space(*a, *b);
}

}  // namespace flatpop
