#include "flatpop/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "flatpop/flat_metric.hpp"
#include "flatpop/rng.hpp"

namespace flatpop {

namespace {

std::function<double(double)> constant_fn(double v) {
  return [v](double) { return v; };
}

}  // namespace

double HeterogeneityKernel::bl_bound(double t) const {
  return std::max(mass_bound(t), lip_bound(t));
}

GrowthTerm zero_growth() {
  return {[](double, const Point&, const AtomicMeasure*) { return 0.0; },
          constant_fn(0.0), constant_fn(0.0), constant_fn(0.0)};
}

GrowthTerm constant_growth(double rate) {
  return {[rate](double, const Point&, const AtomicMeasure*) { return rate; },
          constant_fn(std::fabs(rate)), constant_fn(0.0), constant_fn(0.0)};
}

GrowthTerm logistic_growth(double r, double K, double mass_radius) {
  if (!(K > 0.0)) throw std::invalid_argument("logistic capacity must be positive");
  return {[r, K](double, const Point&, const AtomicMeasure* mu) {
            const double mass = mu ? mu->tv_norm() : 0.0;
            return r * (1.0 - mass / K);
          },
          constant_fn(std::fabs(r) * (1.0 + mass_radius / K)), constant_fn(0.0),
          // |c(mu) - c(nu)| = r |mu(S) - nu(S)| / K <= (r/K) rho_F(mu, nu)
          constant_fn(std::fabs(r) / K)};
}

HeterogeneityKernel zero_kernel(SpacePtr space) {
  return {[space](double, const Point&, const AtomicMeasure*) {
            return AtomicMeasure::zero(space);
          },
          constant_fn(0.0), constant_fn(0.0), constant_fn(0.0)};
}

HeterogeneityKernel point_jump_kernel(SpacePtr space, double rate,
                                      std::function<Point(const Point&)> jump,
                                      double jump_lipschitz) {
  if (!(rate >= 0.0)) throw std::invalid_argument("kernel rate must be nonnegative");
  return {[space, rate, jump](double, const Point& x, const AtomicMeasure*) {
            return AtomicMeasure::dirac(space, jump(x), rate);
          },
          constant_fn(rate), constant_fn(rate * jump_lipschitz),
          constant_fn(0.0)};
}

InfluxTerm zero_influx(SpacePtr space) {
  return {[space](double, const AtomicMeasure*) { return AtomicMeasure::zero(space); },
          constant_fn(0.0), constant_fn(0.0)};
}

InfluxTerm point_influx(SpacePtr space, double rate, Point source) {
  if (!(rate >= 0.0)) throw std::invalid_argument("influx rate must be nonnegative");
  return {[space, rate, source](double, const AtomicMeasure*) {
            return AtomicMeasure::dirac(space, source, rate);
          },
          constant_fn(rate), constant_fn(0.0)};
}

bool ValidationReport::valid() const {
  return worst_ratio() <= 1.0 + 1e-6;
}

double ValidationReport::worst_ratio() const {
  double w = 0.0;
  for (const auto& i : items) w = std::max(w, i.max_ratio);
  return w;
}

namespace {

double ratio(double observed, double declared) {
  if (observed == 0.0) return 0.0;
  if (declared <= 0.0) return std::numeric_limits<double>::infinity();
  return observed / declared;
}

}  // namespace

ValidationReport validate_assumptions(const ModelFunctions& model,
                                      const ValidationConfig& cfg) {
  Rng rng(cfg.seed);
  const auto& space = model.space;
  double r_c_sup = 0.0, r_c_lip = 0.0, r_c_meas = 0.0;
  double r_k_mass = 0.0, r_k_lip = 0.0, r_k_meas = 0.0;
  double r_n_mass = 0.0, r_n_meas = 0.0;
  double r_x_lip = 0.0;

  for (int s = 0; s < cfg.samples; ++s) {
    const double t = rng.uniform(0.0, cfg.t_end);
    const Point x1 = sample_point(*space, rng, cfg.point_radius);
    const Point x2 = sample_point(*space, rng, cfg.point_radius);
    const AtomicMeasure mu =
        sample_measure(space, rng, cfg.point_radius, 3, cfg.mass_cap);
    const AtomicMeasure nu =
        sample_measure(space, rng, cfg.point_radius, 3, cfg.mass_cap);
    const double dx = space->distance(x1, x2);
    const double dmu = flat_distance(mu, nu);
    const AtomicMeasure* marg = model.measure_dependent ? &mu : nullptr;
    const AtomicMeasure* narg = model.measure_dependent ? &nu : nullptr;

    const double c1 = model.growth.value(t, x1, marg);
    const double c2 = model.growth.value(t, x2, marg);
    r_c_sup = std::max(r_c_sup, ratio(std::fabs(c1), model.growth.sup_bound(t)));
    if (dx > 0.0)
      r_c_lip = std::max(r_c_lip,
                          ratio(std::fabs(c1 - c2) / dx, model.growth.lip_bound(t)));
    if (model.measure_dependent && dmu > 0.0) {
      const double cn = model.growth.value(t, x1, narg);
      r_c_meas = std::max(
          r_c_meas, ratio(std::fabs(c1 - cn) / dmu, model.growth.measure_lip(t)));
    }

    const AtomicMeasure k1 = model.kernel.value(t, x1, marg);
    const AtomicMeasure k2 = model.kernel.value(t, x2, marg);
    r_k_mass = std::max(r_k_mass, ratio(k1.tv_norm(), model.kernel.mass_bound(t)));
    if (dx > 0.0)
      r_k_lip = std::max(
          r_k_lip, ratio(flat_distance(k1, k2) / dx, model.kernel.lip_bound(t)));
    if (model.measure_dependent && dmu > 0.0) {
      const AtomicMeasure kn = model.kernel.value(t, x1, narg);
      r_k_meas = std::max(
          r_k_meas, ratio(flat_distance(k1, kn) / dmu, model.kernel.measure_lip(t)));
    }

    const AtomicMeasure n1 = model.influx.value(t, marg);
    r_n_mass = std::max(r_n_mass, ratio(n1.tv_norm(), model.influx.mass_bound(t)));
    if (model.measure_dependent && dmu > 0.0) {
      const AtomicMeasure nn = model.influx.value(t, narg);
      r_n_meas = std::max(
          r_n_meas, ratio(flat_distance(n1, nn) / dmu, model.influx.measure_lip(t)));
    }

    if (dx > 0.0) {
      const double tau = rng.uniform(0.0, t);
      const double dmoved = space->distance(model.flow.at(t, tau, x1),
                                            model.flow.at(t, tau, x2));
      r_x_lip = std::max(
          r_x_lip, ratio(dmoved / dx, model.flow.lipschitz_bound(t - tau)));
    }
  }

  ValidationReport report;
  report.items = {{"growth.sup", r_c_sup},     {"growth.lip", r_c_lip},
                  {"growth.measure_lip", r_c_meas},
                  {"kernel.mass", r_k_mass},   {"kernel.lip", r_k_lip},
                  {"kernel.measure_lip", r_k_meas},
                  {"influx.mass", r_n_mass},   {"influx.measure_lip", r_n_meas},
                  {"flow.lip", r_x_lip}};
  return report;
}

double solver_constant(const ModelFunctions& model, double t_end,
                       int resolution) {
  if (!(t_end > 0.0)) throw std::invalid_argument("t_end must be positive");
  const int n = std::max(1, resolution);
  const double h = t_end / n;

  // Upper-Riemann samples of the declared bounds on the node grid.
  std::vector<double> csup(n + 1), clip(n + 1);
  for (int i = 0; i <= n; ++i) {
    csup[i] = model.growth.sup_bound(i * h);
    clip[i] = model.growth.lip_bound(i * h);
  }
  double int_csup = 0.0;
  for (int i = 0; i < n; ++i) int_csup += h * std::max(csup[i], csup[i + 1]);
  const double growth_factor = std::exp(int_csup);

  auto lx = [&](double dt) {
    const double v = model.flow.lipschitz_bound(dt);
    if (!std::isfinite(v))
      throw std::runtime_error("flow Lipschitz bound unbounded on the span");
    return v;
  };

  double best = 0.0;
  for (int a = 0; a <= n; ++a) {  // tau = a h
    double inner = 0.0;
    best = std::max(best, lx(0.0));
    for (int b = a + 1; b <= n; ++b) {  // t = b h
      inner += h * std::max(clip[b - 1], clip[b]) * lx((b - a) * h);
      best = std::max(best, lx((b - a) * h) + inner);
    }
  }
  return growth_factor * best;
}

double apriori_mass_bound(const ModelFunctions& model, double initial_mass,
                          double t_end, int resolution) {
  const int n = std::max(1, resolution);
  const double h = t_end / n;
  double bound = initial_mass;
  for (int i = 0; i < n; ++i) {
    const double t0 = i * h, t1 = (i + 1) * h;
    const double c = std::max(model.growth.sup_bound(t0), model.growth.sup_bound(t1));
    const double eta = std::max(model.kernel.mass_bound(t0), model.kernel.mass_bound(t1));
    const double inflow = std::max(model.influx.mass_bound(t0), model.influx.mass_bound(t1));
    bound = bound * std::exp(h * (c + eta)) + h * inflow * std::exp(h * (c + eta));
  }
  return bound;
}

}  // namespace flatpop
