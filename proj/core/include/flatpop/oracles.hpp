#pragma once

#include "flatpop/flat_metric.hpp"
#include "flatpop/metric_space.hpp"

namespace flatpop {

/// Reference computations for the verification batteries. These stay
/// independent of the production flat-metric path (which goes through the
/// transshipment dual): the grid search enumerates test-function values
/// directly and the simplex solves the primal LP with a textbook tableau.

/// Brute-force maximization of the flat LP over test-function values on a
/// uniform grid of the given step, with interval propagation between
/// variables. The last `closed_form_tail` variables (at most 2) are
/// optimized exactly instead of enumerated, which keeps supports of size
/// 3-4 tractable at step 1e-3. The result is a lower bound on the LP
/// value, within O(step) of it.
double flat_value_grid_search(const FlatProblem& problem, double step = 1e-3,
                              int closed_form_tail = 2);

/// Dense primal simplex (Bland's rule) on the flat LP in standard form.
double flat_value_simplex(const FlatProblem& problem);

/// rho_F(a dirac_x, b dirac_y) = |a - b| + min(a, b) * min(d, 2).
double dirac_flat_value(double a, double b, double d);

/// Single-source shortest path on a graph space's edge list; independent
/// of the precomputed all-pairs table.
double dijkstra_vertex_distance(const MetricSpace& graph_space, int from,
                                int to);

}  // namespace flatpop
