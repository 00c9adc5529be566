#pragma once

#include <functional>
#include <vector>

#include "flatpop/metric_space.hpp"

namespace flatpop {

struct Atom {
  Point location;
  double weight = 0.0;
};

/// Finitely supported nonnegative measure: the computational stand-in for
/// the cone of finite nonnegative Borel measures on the space. Immutable
/// value type; every operation returns a new measure.
class AtomicMeasure {
 public:
  AtomicMeasure() = default;
  /// Throws std::invalid_argument on negative weights or atoms outside the
  /// space. Zero-weight atoms are allowed (removable by compact()).
  AtomicMeasure(SpacePtr space, std::vector<Atom> atoms);

  static AtomicMeasure zero(SpacePtr space) { return AtomicMeasure(std::move(space), {}); }
  static AtomicMeasure dirac(SpacePtr space, Point location, double weight = 1.0);

  const SpacePtr& space() const { return space_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }

  /// Total mass. Equals the TV norm since all weights are nonnegative.
  double tv_norm() const;

 private:
  SpacePtr space_;
  std::vector<Atom> atoms_;
};

/// Sum of w_i * psi(x_i).
double integrate(const AtomicMeasure& mu,
                 const std::function<double(const Point&)>& psi);

/// Image measure under a point map; weights (and hence mass) unchanged.
/// `target` defaults to the source space when the map is an endomorphism.
AtomicMeasure push_forward(const AtomicMeasure& mu,
                           const std::function<Point(const Point&)>& map,
                           SpacePtr target = nullptr);

/// Multiplies each atom weight by g(x_i); g must be nonnegative on the
/// support (growth factors are exponentials) or std::invalid_argument.
AtomicMeasure reweight(const AtomicMeasure& mu,
                       const std::function<double(const Point&)>& g);

AtomicMeasure add(const AtomicMeasure& mu, const AtomicMeasure& nu);
AtomicMeasure scale(const AtomicMeasure& mu, double s);

struct CompactResult {
  AtomicMeasure measure;
  /// Mass removed by the weight floor.
  double dropped_mass = 0.0;
  /// Sum over merged atoms of weight * distance moved; together with
  /// dropped_mass this bounds the flat distance to the input.
  double moved_bound = 0.0;
};

/// Greedy clustering: atoms are visited in order of descending weight
/// (ties by insertion order); each unclaimed atom becomes a representative
/// and absorbs the full mass of later atoms within merge_radius of it.
/// Clusters lighter than weight_floor are dropped. Guarantees
/// flat_distance(input, output) <= moved_bound + dropped_mass
/// <= merge_radius * tv_norm(input) + dropped_mass.
CompactResult compact(const AtomicMeasure& mu, double merge_radius,
                      double weight_floor);

/// Time-grid-indexed family of measures approximating a narrowly
/// continuous path t -> mu_t.
class MeasurePath {
 public:
  MeasurePath() = default;
  /// grid strictly increasing with grid[0] == 0; one snapshot per node.
  MeasurePath(std::vector<double> grid, std::vector<AtomicMeasure> snapshots);

  /// Constant-in-time path, the usual initial iterate.
  static MeasurePath constant(std::vector<double> grid, const AtomicMeasure& value);

  const std::vector<double>& grid() const { return grid_; }
  const std::vector<AtomicMeasure>& snapshots() const { return snapshots_; }
  std::size_t size() const { return grid_.size(); }

  const AtomicMeasure& at(std::size_t k) const { return snapshots_.at(k); }
  /// Snapshot at the last grid node <= t (piecewise-constant-left reading).
  const AtomicMeasure& at_time(double t) const;

 private:
  std::vector<double> grid_;
  std::vector<AtomicMeasure> snapshots_;
};

}  // namespace flatpop
