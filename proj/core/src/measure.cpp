#include "flatpop/measure.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace flatpop {

AtomicMeasure::AtomicMeasure(SpacePtr space, std::vector<Atom> atoms)
    : space_(std::move(space)), atoms_(std::move(atoms)) {
  if (!space_) throw std::invalid_argument("measure needs a space");
  for (const auto& a : atoms_) {
    if (!(a.weight >= 0.0))
      throw std::invalid_argument("atom weights must be nonnegative");
    if (!space_->contains(a.location))
      throw std::invalid_argument("atom location invalid for the space");
  }
}

AtomicMeasure AtomicMeasure::dirac(SpacePtr space, Point location, double weight) {
  return AtomicMeasure(std::move(space), {{std::move(location), weight}});
}

double AtomicMeasure::tv_norm() const {
  double s = 0.0;
  for (const auto& a : atoms_) s += a.weight;
  return s;
}

double integrate(const AtomicMeasure& mu,
                 const std::function<double(const Point&)>& psi) {
  double s = 0.0;
  for (const auto& a : mu.atoms()) s += a.weight * psi(a.location);
  return s;
}

AtomicMeasure push_forward(const AtomicMeasure& mu,
                           const std::function<Point(const Point&)>& map,
                           SpacePtr target) {
  std::vector<Atom> out;
  out.reserve(mu.size());
  for (const auto& a : mu.atoms()) out.push_back({map(a.location), a.weight});
  return AtomicMeasure(target ? std::move(target) : mu.space(), std::move(out));
}

AtomicMeasure reweight(const AtomicMeasure& mu,
                       const std::function<double(const Point&)>& g) {
  std::vector<Atom> out;
  out.reserve(mu.size());
  for (const auto& a : mu.atoms()) {
    const double f = g(a.location);
    if (!(f >= 0.0))
      throw std::invalid_argument("reweight factor must be nonnegative");
    out.push_back({a.location, a.weight * f});
  }
  return AtomicMeasure(mu.space(), std::move(out));
}

AtomicMeasure add(const AtomicMeasure& mu, const AtomicMeasure& nu) {
  if (!same_space(mu.space(), nu.space()))
    throw std::invalid_argument("cannot add measures on different spaces");
  std::vector<Atom> out = mu.atoms();
  out.insert(out.end(), nu.atoms().begin(), nu.atoms().end());
  return AtomicMeasure(mu.space(), std::move(out));
}

AtomicMeasure scale(const AtomicMeasure& mu, double s) {
  if (!(s >= 0.0)) throw std::invalid_argument("scale factor must be nonnegative");
  std::vector<Atom> out = mu.atoms();
  for (auto& a : out) a.weight *= s;
  return AtomicMeasure(mu.space(), std::move(out));
}

CompactResult compact(const AtomicMeasure& mu, double merge_radius,
                      double weight_floor) {
  if (!(merge_radius >= 0.0) || !(weight_floor >= 0.0))
    throw std::invalid_argument("compact parameters must be nonnegative");

  std::vector<std::size_t> order(mu.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return mu.atoms()[i].weight > mu.atoms()[j].weight;
  });

  const auto& space = *mu.space();
  std::vector<bool> claimed(mu.size(), false);
  std::vector<Atom> clusters;
  double moved = 0.0;
  for (std::size_t oi = 0; oi < order.size(); ++oi) {
    const std::size_t i = order[oi];
    if (claimed[i]) continue;
    claimed[i] = true;
    Atom rep = mu.atoms()[i];
    for (std::size_t oj = oi + 1; oj < order.size(); ++oj) {
      const std::size_t j = order[oj];
      if (claimed[j]) continue;
      const double d = space.distance(rep.location, mu.atoms()[j].location);
      if (d <= merge_radius) {
        claimed[j] = true;
        rep.weight += mu.atoms()[j].weight;
        moved += mu.atoms()[j].weight * d;
      }
    }
    clusters.push_back(std::move(rep));
  }

  double dropped = 0.0;
  std::vector<Atom> kept;
  kept.reserve(clusters.size());
  for (auto& c : clusters) {
    if (c.weight < weight_floor)
      dropped += c.weight;
    else
      kept.push_back(std::move(c));
  }
  return {AtomicMeasure(mu.space(), std::move(kept)), dropped, moved};
}

MeasurePath::MeasurePath(std::vector<double> grid,
                         std::vector<AtomicMeasure> snapshots)
    : grid_(std::move(grid)), snapshots_(std::move(snapshots)) {
  if (grid_.empty()) throw std::invalid_argument("path grid must be nonempty");
  if (grid_.size() != snapshots_.size())
    throw std::invalid_argument("one snapshot per grid node required");
  for (std::size_t i = 1; i < grid_.size(); ++i)
    if (!(grid_[i] > grid_[i - 1]))
      throw std::invalid_argument("path grid must be strictly increasing");
}

MeasurePath MeasurePath::constant(std::vector<double> grid,
                                  const AtomicMeasure& value) {
  std::vector<AtomicMeasure> snaps(grid.size(), value);
  return MeasurePath(std::move(grid), std::move(snaps));
}

const AtomicMeasure& MeasurePath::at_time(double t) const {
  std::size_t k = 0;
  while (k + 1 < grid_.size() && grid_[k + 1] <= t) ++k;
  return snapshots_[k];
}

}  // namespace flatpop
