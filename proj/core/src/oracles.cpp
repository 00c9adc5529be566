#include "flatpop/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

namespace flatpop {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// max ca*fa + cb*fb over fa in [la,ua], fb in [lb,ub], |fa - fb| <= d.
// The optimum sits at a vertex whose fa coordinate comes from the
// candidate set below.
double best_pair(double ca, double cb, double la, double ua, double lb,
                 double ub, double d) {
  if (la > ua || lb > ub) return -kInf;
  const double candidates[6] = {la, ua, lb + d, lb - d, ub + d, ub - d};
  double best = -kInf;
  for (double fa : candidates) {
    fa = std::clamp(fa, la, ua);
    const double lo = std::max(lb, fa - d);
    const double hi = std::min(ub, fa + d);
    if (lo > hi) continue;
    const double fb = cb >= 0.0 ? hi : lo;
    best = std::max(best, ca * fa + cb * fb);
  }
  return best;
}

struct GridSearch {
  const FlatProblem& p;
  double step;
  int tail;
  int n;
  std::vector<double> values;
  double best = -kInf;

  void recurse(int i) {
    if (n - i == 0) {
      double v = 0.0;
      for (int k = 0; k < n; ++k) v += p.coeff[k] * values[k];
      best = std::max(best, v);
      return;
    }
    // Feasibility window from the already-fixed variables.
    auto window = [&](int idx, double* lo, double* hi) {
      *lo = -1.0;
      *hi = 1.0;
      for (int k = 0; k < i; ++k) {
        const double d = std::min(p.dmat[idx][k], 2.0);
        *lo = std::max(*lo, values[k] - d);
        *hi = std::min(*hi, values[k] + d);
      }
    };
    if (n - i == 1 && tail >= 1) {
      double lo, hi;
      window(i, &lo, &hi);
      if (lo > hi) return;
      double v = 0.0;
      for (int k = 0; k < i; ++k) v += p.coeff[k] * values[k];
      v += p.coeff[i] * (p.coeff[i] >= 0.0 ? hi : lo);
      best = std::max(best, v);
      return;
    }
    if (n - i == 2 && tail >= 2) {
      double la, ua, lb, ub;
      window(i, &la, &ua);
      window(i + 1, &lb, &ub);
      const double v2 = best_pair(p.coeff[i], p.coeff[i + 1], la, ua, lb, ub,
                                  std::min(p.dmat[i][i + 1], 2.0));
      if (v2 == -kInf) return;
      double v = v2;
      for (int k = 0; k < i; ++k) v += p.coeff[k] * values[k];
      best = std::max(best, v);
      return;
    }
    double lo, hi;
    window(i, &lo, &hi);
    if (lo > hi) return;
    const long first = std::lround(std::ceil((lo + 1.0) / step - 1e-9));
    const long last = std::lround(std::floor((hi + 1.0) / step + 1e-9));
    for (long m = first; m <= last; ++m) {
      values[i] = -1.0 + m * step;
      recurse(i + 1);
    }
  }
};

}  // namespace

double flat_value_grid_search(const FlatProblem& problem, double step,
                              int closed_form_tail) {
  const int n = static_cast<int>(problem.support.size());
  if (n == 0) return 0.0;
  GridSearch gs{problem, step, std::clamp(closed_form_tail, 0, 2), n,
                std::vector<double>(n, 0.0)};
  gs.recurse(0);
  return gs.best;
}

double flat_value_simplex(const FlatProblem& problem) {
  const int n = static_cast<int>(problem.support.size());
  if (n == 0) return 0.0;

  // Substitute x = f + 1 >= 0. Constraints: x_i <= 2 and
  // x_i - x_j <= min(d_ij, 2) for every ordered pair; the origin is
  // feasible so the slack basis starts the simplex directly.
  std::vector<std::vector<double>> rows;    // coefficients on x
  std::vector<double> rhs;
  for (int i = 0; i < n; ++i) {
    std::vector<double> r(n, 0.0);
    r[i] = 1.0;
    rows.push_back(r);
    rhs.push_back(2.0);
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) {
        std::vector<double> r(n, 0.0);
        r[i] = 1.0;
        r[j] = -1.0;
        rows.push_back(r);
        rhs.push_back(std::min(problem.dmat[i][j], 2.0));
      }

  const int m = static_cast<int>(rows.size());
  const int cols = n + m + 1;  // structural + slack + rhs
  std::vector<std::vector<double>> tab(m + 1, std::vector<double>(cols, 0.0));
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < n; ++c) tab[r][c] = rows[r][c];
    tab[r][n + r] = 1.0;
    tab[r][cols - 1] = rhs[r];
  }
  for (int c = 0; c < n; ++c) tab[m][c] = -problem.coeff[c];

  std::vector<int> basis(m);
  for (int r = 0; r < m; ++r) basis[r] = n + r;

  const double eps = 1e-11;
  for (long iter = 0; iter < 200000; ++iter) {
    int pivot_col = -1;
    for (int c = 0; c < cols - 1; ++c)
      if (tab[m][c] < -eps) {  // Bland: first improving column
        pivot_col = c;
        break;
      }
    if (pivot_col < 0) break;
    int pivot_row = -1;
    double best_ratio = kInf;
    for (int r = 0; r < m; ++r) {
      if (tab[r][pivot_col] > eps) {
        const double ratio = tab[r][cols - 1] / tab[r][pivot_col];
        if (ratio < best_ratio - eps ||
            (ratio < best_ratio + eps &&
             (pivot_row < 0 || basis[r] < basis[pivot_row]))) {
          best_ratio = ratio;
          pivot_row = r;
        }
      }
    }
    if (pivot_row < 0) throw std::runtime_error("flat LP unbounded in simplex oracle");
    const double pv = tab[pivot_row][pivot_col];
    for (int c = 0; c < cols; ++c) tab[pivot_row][c] /= pv;
    for (int r = 0; r <= m; ++r) {
      if (r == pivot_row) continue;
      const double factor = tab[r][pivot_col];
      if (factor == 0.0) continue;
      for (int c = 0; c < cols; ++c) tab[r][c] -= factor * tab[pivot_row][c];
    }
    basis[pivot_row] = pivot_col;
  }

  double shift = 0.0;  // objective was c.(x - 1)
  for (int c = 0; c < n; ++c) shift += problem.coeff[c];
  return tab[m][cols - 1] - shift;
}

double dirac_flat_value(double a, double b, double d) {
  return std::fabs(a - b) + std::min(a, b) * std::min(d, 2.0);
}

double dijkstra_vertex_distance(const MetricSpace& graph_space, int from,
                                int to) {
  const auto& gr = graph_space.as_graph();
  std::vector<std::vector<std::pair<int, double>>> adj(gr.vertex_count);
  for (const auto& e : gr.edges) {
    adj[e.u].push_back({e.v, e.length});
    adj[e.v].push_back({e.u, e.length});
  }
  std::vector<double> dist(gr.vertex_count, kInf);
  dist[from] = 0.0;
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  heap.push({0.0, from});
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    if (u == to) break;
    for (const auto& [v, w] : adj[u])
      if (d + w < dist[v]) {
        dist[v] = d + w;
        heap.push({dist[v], v});
      }
  }
  return dist[to];
}

}  // namespace flatpop
