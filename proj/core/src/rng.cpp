#include "flatpop/rng.hpp"

#include <numbers>

namespace flatpop {

Point sample_point(const MetricSpace& space, Rng& rng, double radius) {
  switch (space.kind()) {
    case SpaceKind::Euclidean: {
      std::vector<double> c(space.as_euclidean().dimension);
      for (auto& v : c) v = rng.uniform(-radius, radius);
      return Point::euclidean(std::move(c));
    }
    case SpaceKind::Circle:
      return Point::circle(rng.uniform(0.0, 2.0 * std::numbers::pi));
    case SpaceKind::Discrete:
      return Point::discrete(rng.uniform_int(0, space.as_discrete().count - 1));
    case SpaceKind::Graph: {
      const auto& gr = space.as_graph();
      const int e = rng.uniform_int(0, static_cast<int>(gr.edges.size()) - 1);
      return Point::graph(e, rng.uniform(0.0, gr.edges[e].length));
    }
    case SpaceKind::Trajectory: {
      const auto& tr = space.as_trajectory();
      const int dim = space.trajectory_sample_dim();
      std::vector<double> s(tr.grid.size() * static_cast<std::size_t>(dim));
      if (std::holds_alternative<MetricSpace::Discrete>(tr.target)) {
        const int count = std::get<MetricSpace::Discrete>(tr.target).count;
        for (auto& v : s) v = rng.uniform_int(0, count - 1);
      } else {
        for (auto& v : s) v = rng.uniform(-radius, radius);
      }
      return Point::trajectory(std::move(s));
    }
  }
  throw std::logic_error("unreachable backend");
}

AtomicMeasure sample_measure(const SpacePtr& space, Rng& rng, double radius,
                             int max_atoms, double mass_cap) {
  const int n = rng.uniform_int(1, max_atoms);
  std::vector<Atom> atoms;
  atoms.reserve(n);
  for (int i = 0; i < n; ++i)
    atoms.push_back({sample_point(*space, rng, radius),
                     rng.uniform(0.0, mass_cap / n)});
  return AtomicMeasure(space, std::move(atoms));
}

}  // namespace flatpop
