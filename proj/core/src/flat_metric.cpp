#include "flatpop/flat_metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace flatpop {

namespace {

// Deterministic ordering on payloads so problem assembly does not depend
// on which measure is passed first.
bool point_less(const Point& a, const Point& b) {
  if (a.payload.index() != b.payload.index())
    return a.payload.index() < b.payload.index();
  return std::visit(
      [&](const auto& pa) {
        using T = std::decay_t<decltype(pa)>;
        const auto& pb = std::get<T>(b.payload);
        if constexpr (std::is_same_v<T, EuclideanPoint>) {
          return pa.coords < pb.coords;
        } else if constexpr (std::is_same_v<T, CirclePoint>) {
          return pa.angle < pb.angle;
        } else if constexpr (std::is_same_v<T, GraphPoint>) {
          return pa.edge != pb.edge ? pa.edge < pb.edge : pa.offset < pb.offset;
        } else if constexpr (std::is_same_v<T, DiscretePoint>) {
          return pa.index < pb.index;
        } else {
          return pa.samples < pb.samples;
        }
      },
      a.payload);
}

struct McmfEdge {
  int to;
  int rev;
  double cap;
  double cost;
};

// Min-cost max-flow by successive shortest paths with Johnson potentials.
// Every augmentation zeroes the residual of at least one finite-capacity
// arc exactly, so the number of augmentations is bounded by the number of
// finite arcs.
class Mcmf {
 public:
  explicit Mcmf(int n) : graph_(n) {}

  void add_edge(int from, int to, double cap, double cost) {
    graph_[from].push_back({to, static_cast<int>(graph_[to].size()), cap, cost});
    graph_[to].push_back({from, static_cast<int>(graph_[from].size()) - 1, 0.0, -cost});
  }

  // Pushes as much flow as possible from s to t; returns total cost.
  double run(int s, int t) {
    const int n = static_cast<int>(graph_.size());
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> potential(n, 0.0), dist(n);
    std::vector<int> prev_node(n), prev_edge(n);
    std::vector<bool> done(n);
    double total_cost = 0.0;

    for (;;) {
      std::fill(dist.begin(), dist.end(), inf);
      std::fill(done.begin(), done.end(), false);
      dist[s] = 0.0;
      for (;;) {  // dense Dijkstra
        int u = -1;
        double best = inf;
        for (int v = 0; v < n; ++v)
          if (!done[v] && dist[v] < best) {
            best = dist[v];
            u = v;
          }
        if (u < 0) break;
        done[u] = true;
        for (std::size_t ei = 0; ei < graph_[u].size(); ++ei) {
          const auto& e = graph_[u][ei];
          if (e.cap <= 0.0) continue;
          double rc = e.cost + potential[u] - potential[e.to];
          if (rc < 0.0) rc = 0.0;  // guard against rounding
          if (dist[u] + rc < dist[e.to]) {
            dist[e.to] = dist[u] + rc;
            prev_node[e.to] = u;
            prev_edge[e.to] = static_cast<int>(ei);
          }
        }
      }
      if (dist[t] == inf) break;
      for (int v = 0; v < n; ++v)
        potential[v] += (dist[v] == inf) ? dist[t] : dist[v];

      double push = inf;
      for (int v = t; v != s; v = prev_node[v])
        push = std::min(push, graph_[prev_node[v]][prev_edge[v]].cap);
      if (!(push > 0.0)) break;
      for (int v = t; v != s; v = prev_node[v]) {
        auto& e = graph_[prev_node[v]][prev_edge[v]];
        e.cap -= push;
        graph_[e.to][e.rev].cap += push;
        total_cost += push * e.cost;
      }
    }
    return total_cost;
  }

  // Flow sent on the k-th edge added from `from` (by insertion order),
  // read off the reverse edge's residual.
  double flow_on(int from, int edge_index) const {
    const auto& e = graph_[from][edge_index];
    return graph_[e.to][e.rev].cap;
  }

  const std::vector<std::vector<McmfEdge>>& graph() const { return graph_; }

 private:
  std::vector<std::vector<McmfEdge>> graph_;
};

struct Transshipment {
  // Node layout: support nodes 0..n-1, then source = n, sink = n + 1.
  Mcmf net;
  int n;
  int source;
  int sink;
  std::vector<int> first_edge;  // index of the first edge added from node i
};

constexpr double kMassCap = 2.0;  // destroy + create bound on transport cost

Transshipment build_transshipment(const FlatProblem& p) {
  const int n = static_cast<int>(p.support.size());
  Transshipment ts{Mcmf(n + 2), n, n, n + 1, std::vector<int>(n, 0)};
  for (int i = 0; i < n; ++i) {
    if (p.coeff[i] > 0.0) {
      ts.net.add_edge(ts.source, i, p.coeff[i], 0.0);
    } else if (p.coeff[i] < 0.0) {
      ts.net.add_edge(ts.source, i, std::numeric_limits<double>::infinity(), 1.0);
    }
  }
  for (int i = 0; i < n; ++i) {
    ts.first_edge[i] = static_cast<int>(ts.net.graph()[i].size());
    if (p.coeff[i] > 0.0) {
      for (int j = 0; j < n; ++j)
        if (p.coeff[j] < 0.0)
          ts.net.add_edge(i, j, std::numeric_limits<double>::infinity(),
                          std::min(p.dmat[i][j], kMassCap));
      ts.net.add_edge(i, ts.sink, std::numeric_limits<double>::infinity(), 1.0);
    } else if (p.coeff[i] < 0.0) {
      ts.net.add_edge(i, ts.sink, -p.coeff[i], 0.0);
    }
  }
  return ts;
}

}  // namespace

FlatProblem assemble_flat_problem(const AtomicMeasure& mu,
                                  const AtomicMeasure& nu) {
  if (!same_space(mu.space(), nu.space()))
    throw std::invalid_argument("flat distance requires measures on one space");
  const auto& space = *mu.space();

  struct Entry {
    Point location;
    double coeff;
  };
  std::vector<Entry> entries;
  auto accumulate = [&](const AtomicMeasure& m, double sign) {
    for (const auto& a : m.atoms()) {
      bool merged = false;
      for (auto& e : entries) {
        if (space.distance(e.location, a.location) == 0.0) {
          e.coeff += sign * a.weight;
          merged = true;
          break;
        }
      }
      if (!merged) entries.push_back({a.location, sign * a.weight});
    }
  };
  accumulate(mu, 1.0);
  accumulate(nu, -1.0);

  std::erase_if(entries, [](const Entry& e) { return e.coeff == 0.0; });
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return point_less(a.location, b.location); });
  // Canonical sign so assemble(mu, nu) and assemble(nu, mu) coincide.
  if (!entries.empty() && entries.front().coeff < 0.0)
    for (auto& e : entries) e.coeff = -e.coeff;

  FlatProblem p;
  p.support.reserve(entries.size());
  p.coeff.reserve(entries.size());
  for (auto& e : entries) {
    p.support.push_back(std::move(e.location));
    p.coeff.push_back(e.coeff);
  }
  const int n = static_cast<int>(p.support.size());
  p.dmat.assign(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      p.dmat[i][j] = p.dmat[j][i] = space.distance(p.support[i], p.support[j]);
  return p;
}

double flat_lp_value(const FlatProblem& problem) {
  if (problem.support.empty()) return 0.0;
  Transshipment ts = build_transshipment(problem);
  return ts.net.run(ts.source, ts.sink);
}

FlatSolution flat_lp_solve(const FlatProblem& problem) {
  FlatSolution sol;
  const int n = static_cast<int>(problem.support.size());
  sol.optimal_psi.assign(n, 0.0);
  if (n == 0) return sol;

  Transshipment ts = build_transshipment(problem);
  sol.value = ts.net.run(ts.source, ts.sink);

  // Recover an optimal test function from the tight constraints of the
  // optimal flow: a difference-constraint system solved by Bellman-Ford
  // from a virtual root (node n) pinned at 0.
  const double inf = std::numeric_limits<double>::infinity();
  struct Arc {
    int from, to;
    double w;  // psi_to - psi_from <= w  encoded as edge from -> to
  };
  std::vector<Arc> arcs;
  const int root = n;
  for (int i = 0; i < n; ++i) {
    arcs.push_back({root, i, 1.0});   // psi_i <= 1
    arcs.push_back({i, root, 1.0});   // psi_i >= -1
    for (int j = 0; j < n; ++j)
      if (j != i)
        arcs.push_back({j, i, std::min(problem.dmat[i][j], kMassCap)});
  }
  const auto& g = ts.net.graph();
  for (int i = 0; i < n; ++i) {
    if (problem.coeff[i] > 0.0) {
      int ei = ts.first_edge[i];
      for (int j = 0; j < n; ++j) {
        if (problem.coeff[j] >= 0.0) continue;
        const double f = ts.net.flow_on(i, ei);
        if (f > 0.0)  // psi_i - psi_j = min(d, 2): add the >= direction
          arcs.push_back({i, g[i][ei].to, -std::min(problem.dmat[i][g[i][ei].to], kMassCap)});
        ++ei;
      }
      const double destroyed = ts.net.flow_on(i, ei);
      if (destroyed > 0.0) arcs.push_back({i, root, -1.0});  // psi_i = 1
    }
  }
  for (std::size_t ei = 0; ei < g[ts.source].size(); ++ei) {
    const auto& e = g[ts.source][ei];
    if (e.to == ts.sink || e.cost != 1.0) continue;
    if (ts.net.flow_on(ts.source, static_cast<int>(ei)) > 0.0)
      arcs.push_back({root, e.to, -1.0});  // created mass: psi_j = -1
  }

  std::vector<double> dist(n + 1, inf);
  dist[root] = 0.0;
  for (int pass = 0; pass <= n + 1; ++pass) {
    bool changed = false;
    for (const auto& a : arcs) {
      if (dist[a.from] == inf) continue;
      if (dist[a.from] + a.w < dist[a.to] - 1e-15) {
        dist[a.to] = dist[a.from] + a.w;
        changed = true;
      }
    }
    if (!changed) break;
    if (pass == n + 1)
      throw std::runtime_error("inconsistent tight-constraint system");
  }
  for (int i = 0; i < n; ++i) sol.optimal_psi[i] = dist[i];
  return sol;
}

double flat_distance(const AtomicMeasure& mu, const AtomicMeasure& nu) {
  return flat_lp_value(assemble_flat_problem(mu, nu));
}

BlSeminorms bl_seminorms(const std::vector<double>& values,
                         const std::vector<std::vector<double>>& dmat) {
  if (values.empty()) throw std::invalid_argument("need at least one sample");
  BlSeminorms out;
  for (double v : values) out.sup_norm = std::max(out.sup_norm, std::fabs(v));
  for (std::size_t i = 0; i < values.size(); ++i)
    for (std::size_t j = i + 1; j < values.size(); ++j) {
      const double d = dmat[i][j];
      if (d == 0.0) {
        if (values[i] != values[j])
          throw std::invalid_argument("conflicting values at zero distance");
        continue;
      }
      out.lipschitz = std::max(out.lipschitz, std::fabs(values[i] - values[j]) / d);
    }
  return out;
}

double bielecki_distance(const MeasurePath& p, const MeasurePath& q,
                         double lambda, const std::vector<double>& f) {
  if (p.grid() != q.grid())
    throw std::invalid_argument("bielecki distance requires identical grids");
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  if (f.size() != p.size())
    throw std::invalid_argument("one weight per grid node required");
  double q_acc = 0.0;
  double best = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (k > 0) q_acc += (p.grid()[k] - p.grid()[k - 1]) * f[k - 1];
    best = std::max(best, std::exp(-lambda * q_acc) * flat_distance(p.at(k), q.at(k)));
  }
  return best;
}

double sup_flat_distance(const MeasurePath& p, const MeasurePath& q) {
  if (p.grid() != q.grid())
    throw std::invalid_argument("sup distance requires identical grids");
  double best = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k)
    best = std::max(best, flat_distance(p.at(k), q.at(k)));
  return best;
}

double neighborhood_mass_gap(const AtomicMeasure& mu, const AtomicMeasure& nu,
                             const std::vector<Point>& T, double delta) {
  if (!(delta > 0.0) || delta > 1.0)
    throw std::invalid_argument("delta must lie in (0, 1]");
  if (!same_space(mu.space(), nu.space()))
    throw std::invalid_argument("measures must live on one space");
  const auto& space = *mu.space();
  auto dist_to_set = [&](const Point& x) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& t : T) best = std::min(best, space.distance(x, t));
    return best;
  };
  double mu_T = 0.0;
  for (const auto& a : mu.atoms())
    if (dist_to_set(a.location) == 0.0) mu_T += a.weight;
  double nu_U = 0.0;
  for (const auto& a : nu.atoms())
    if (dist_to_set(a.location) < delta) nu_U += a.weight;
  return nu_U + flat_distance(mu, nu) / delta - mu_T;
}

}  // namespace flatpop
