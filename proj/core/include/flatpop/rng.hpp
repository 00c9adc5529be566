#pragma once

#include <cstdint>
#include <random>

#include "flatpop/measure.hpp"
#include "flatpop/metric_space.hpp"

namespace flatpop {

/// Deterministic uniform generator: identical streams on every platform
/// (std distributions are not portable across standard libraries).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(uniform() * (hi - lo + 1));
  }

 private:
  std::mt19937_64 engine_;
};

/// Uniform-ish point of the space; `radius` bounds coordinates on
/// unbounded backends.
Point sample_point(const MetricSpace& space, Rng& rng, double radius);

/// Random measure with 1..max_atoms atoms and total mass <= mass_cap.
AtomicMeasure sample_measure(const SpacePtr& space, Rng& rng, double radius,
                             int max_atoms, double mass_cap);

}  // namespace flatpop
