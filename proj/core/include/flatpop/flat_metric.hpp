#pragma once

#include <vector>

#include "flatpop/measure.hpp"

namespace flatpop {

/// The finite LP behind the flat (dual bounded-Lipschitz) distance:
/// maximize sum coeff_i * psi_i over -1 <= psi_i <= 1 and
/// |psi_i - psi_j| <= dmat_ij. Support points are the deduplicated union
/// of the two measures' atom locations (zero-distance duplicates merged,
/// coefficients summed); coeff_i is the signed weight mu({x_i}) - nu({x_i}).
struct FlatProblem {
  std::vector<Point> support;
  std::vector<double> coeff;
  std::vector<std::vector<double>> dmat;
};

FlatProblem assemble_flat_problem(const AtomicMeasure& mu,
                                  const AtomicMeasure& nu);

/// Exact optimal value of the flat LP. Internally solved through the dual
/// transshipment (mass moved at cost min(d, 2), created or destroyed at
/// cost 1) by successive shortest path augmentation, which is exact up to
/// floating-point rounding.
double flat_lp_value(const FlatProblem& problem);

/// Value plus an optimal test function sampled on the support, recovered
/// from the tight constraints of the optimal transshipment.
struct FlatSolution {
  double value = 0.0;
  std::vector<double> optimal_psi;
};
FlatSolution flat_lp_solve(const FlatProblem& problem);

/// rho_F(mu, nu). Symmetric exactly; requires both measures on the same
/// space (std::invalid_argument otherwise).
double flat_distance(const AtomicMeasure& mu, const AtomicMeasure& nu);

/// (sup norm, Lipschitz constant) of a function sampled at points with
/// pairwise distances dmat. Conflicting values at zero distance are an
/// error.
struct BlSeminorms {
  double sup_norm = 0.0;
  double lipschitz = 0.0;
  double bl_norm() const { return sup_norm > lipschitz ? sup_norm : lipschitz; }
};
BlSeminorms bl_seminorms(const std::vector<double>& values,
                         const std::vector<std::vector<double>>& dmat);

/// Exponentially weighted sup distance between two paths on one grid:
/// max_k exp(-lambda * Q_k) * rho_F(p_k, q_k), with Q_k the left-endpoint
/// quadrature of the weight function f up to t_k.
double bielecki_distance(const MeasurePath& p, const MeasurePath& q,
                         double lambda, const std::vector<double>& f);

/// Plain sup-flat distance between two paths (the natural metric on
/// measure paths; equals bielecki_distance with f == 0).
double sup_flat_distance(const MeasurePath& p, const MeasurePath& q);

/// Slack of the neighborhood-mass inequality
///   mu(T) <= nu(U_delta(T)) + rho_F(mu, nu) / delta,
/// returned as nu(U_delta(T)) + rho_F(mu, nu)/delta - mu(T); nonnegative
/// up to solver tolerance for every delta in (0, 1]. The set T is given by
/// its points; U_delta(T) is the open delta-neighborhood.
double neighborhood_mass_gap(const AtomicMeasure& mu, const AtomicMeasure& nu,
                             const std::vector<Point>& T, double delta);

}  // namespace flatpop
