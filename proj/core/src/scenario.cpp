#include "flatpop/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "flatpop/flat_metric.hpp"

namespace flatpop {

using nlohmann::json;

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

const json& require(const json& j, const std::string& key,
                    const std::string& context) {
  if (!j.is_object() || !j.contains(key))
    throw ConfigError("missing config key '" + context + key + "'");
  return j.at(key);
}

double require_number(const json& j, const std::string& key,
                      const std::string& context) {
  const json& v = require(j, key, context);
  if (!v.is_number())
    throw ConfigError("config key '" + context + key + "' must be a number");
  return v.get<double>();
}

int require_int(const json& j, const std::string& key,
                const std::string& context) {
  const json& v = require(j, key, context);
  if (!v.is_number_integer())
    throw ConfigError("config key '" + context + key + "' must be an integer");
  return v.get<int>();
}

std::string require_string(const json& j, const std::string& key,
                           const std::string& context) {
  const json& v = require(j, key, context);
  if (!v.is_string())
    throw ConfigError("config key '" + context + key + "' must be a string");
  return v.get<std::string>();
}

double number_or(const json& j, const std::string& key, double fallback) {
  if (j.is_object() && j.contains(key)) return j.at(key).get<double>();
  return fallback;
}

std::vector<double> number_array(const json& v, const std::string& where) {
  if (!v.is_array()) throw ConfigError("config key '" + where + "' must be an array");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number())
      throw ConfigError("config key '" + where + "' must hold numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

}  // namespace

SpacePtr space_from_json(const json& block) {
  const std::string kind = require_string(block, "kind", "space.");
  if (kind == "euclidean")
    return MetricSpace::euclidean(require_int(block, "dimension", "space."));
  if (kind == "circle")
    return MetricSpace::circle(require_number(block, "circumference", "space."));
  if (kind == "discrete")
    return MetricSpace::discrete(require_int(block, "count", "space."),
                                 number_or(block, "spacing", 1.0));
  if (kind == "graph") {
    const int vertices = require_int(block, "vertices", "space.");
    const json& edges_json = require(block, "edges", "space.");
    std::vector<GraphEdge> edges;
    for (const auto& e : edges_json) {
      if (!e.is_array() || e.size() != 3)
        throw ConfigError("config key 'space.edges' entries must be [u, v, length]");
      edges.push_back({e[0].get<int>(), e[1].get<int>(), e[2].get<double>()});
    }
    try {
      return MetricSpace::graph(vertices, std::move(edges));
    } catch (const std::invalid_argument& err) {
      throw ConfigError(std::string("config key 'space.edges': ") + err.what());
    }
  }
  if (kind == "trajectory") {
    const std::vector<double> grid =
        number_array(require(block, "grid", "space."), "space.grid");
    const json& target = require(block, "target", "space.");
    const std::string tkind = require_string(target, "kind", "space.target.");
    if (tkind == "euclidean")
      return MetricSpace::trajectory(
          grid, MetricSpace::Euclidean{require_int(target, "dimension",
                                                   "space.target.")});
    if (tkind == "discrete")
      return MetricSpace::trajectory(
          grid, MetricSpace::Discrete{require_int(target, "count", "space.target."),
                                      number_or(target, "spacing", 1.0)});
    throw ConfigError("config key 'space.target.kind' must be euclidean or discrete");
  }
  throw ConfigError("config key 'space.kind' has unknown value '" + kind + "'");
}

Point location_from_json(const json& value, const MetricSpace& space) {
  switch (space.kind()) {
    case SpaceKind::Euclidean:
      return Point::euclidean(number_array(value, "location"));
    case SpaceKind::Circle:
      if (!value.is_number()) throw ConfigError("circle location must be an angle");
      return Point::circle(value.get<double>());
    case SpaceKind::Discrete:
      if (!value.is_number_integer())
        throw ConfigError("discrete location must be an index");
      return Point::discrete(value.get<int>());
    case SpaceKind::Graph: {
      if (value.is_number_integer()) return space.vertex_point(value.get<int>());
      return Point::graph(require_int(value, "edge", "location."),
                          require_number(value, "offset", "location."));
    }
    case SpaceKind::Trajectory:
      return Point::trajectory(number_array(value, "location"));
  }
  throw ConfigError("unsupported space kind for location");
}

namespace {

std::function<Point(const Point&)> jump_from_json(const json& block,
                                                  const SpacePtr& space,
                                                  double* lipschitz) {
  const std::string kind = require_string(block, "kind", "model.kernel.jump.");
  if (kind == "shift") {
    const std::vector<double> offset = number_array(
        require(block, "offset", "model.kernel.jump."), "model.kernel.jump.offset");
    *lipschitz = 1.0;
    return [offset](const Point& x) {
      auto c = std::get<EuclideanPoint>(x.payload).coords;
      for (std::size_t i = 0; i < c.size(); ++i) c[i] += offset[i];
      return Point::euclidean(std::move(c));
    };
  }
  if (kind == "rotate") {
    const double angle = require_number(block, "angle", "model.kernel.jump.");
    *lipschitz = 1.0;
    return [angle](const Point& x) {
      return Point::circle(std::get<CirclePoint>(x.payload).angle + angle);
    };
  }
  if (kind == "to_vertex") {
    const Point target =
        space->vertex_point(require_int(block, "vertex", "model.kernel.jump."));
    *lipschitz = 0.0;
    return [target](const Point&) { return target; };
  }
  if (kind == "to_point") {
    const Point target = location_from_json(
        require(block, "location", "model.kernel.jump."), *space);
    *lipschitz = 0.0;
    return [target](const Point&) { return target; };
  }
  if (kind == "discrete_map") {
    const json& table = require(block, "map", "model.kernel.jump.");
    std::vector<int> map;
    for (const auto& v : table) map.push_back(v.get<int>());
    const double spacing = space->as_discrete().spacing;
    *lipschitz = std::min(spacing, 2.0) / spacing;
    return [map](const Point& x) {
      return Point::discrete(map.at(std::get<DiscretePoint>(x.payload).index));
    };
  }
  throw ConfigError("config key 'model.kernel.jump.kind' has unknown value '" +
                    kind + "'");
}

VectorField field_from_json(const json& block, int dim) {
  const std::string kind = require_string(block, "kind", "model.flow.field.");
  const double radius = number_or(block, "domain_radius", 10.0);
  VectorField f;
  if (kind == "constant") {
    const std::vector<double> v = number_array(
        require(block, "velocity", "model.flow.field."), "model.flow.field.velocity");
    if (static_cast<int>(v.size()) != dim)
      throw ConfigError("config key 'model.flow.field.velocity' dimension mismatch");
    double norm = 0.0;
    for (double c : v) norm += c * c;
    norm = std::sqrt(norm);
    f.velocity = [v](double, const std::vector<double>&, const AtomicMeasure*) {
      return v;
    };
    f.sup_bound = [norm](double) { return norm; };
    f.lip_bound = [](double) { return 0.0; };
    return f;
  }
  if (kind == "linear") {
    const double rate = require_number(block, "rate", "model.flow.field.");
    f.velocity = [rate](double, const std::vector<double>& x, const AtomicMeasure*) {
      std::vector<double> out(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) out[i] = rate * x[i];
      return out;
    };
    f.sup_bound = [rate, radius](double) { return std::fabs(rate) * radius; };
    f.lip_bound = [rate](double) { return std::fabs(rate); };
    return f;
  }
  if (kind == "aggregation") {
    const double strength = require_number(block, "strength", "model.flow.field.");
    f.velocity = [strength](double, const std::vector<double>& x,
                            const AtomicMeasure* mu) {
      std::vector<double> out(x.size(), 0.0);
      if (!mu || mu->empty()) return out;
      const double mass = mu->tv_norm();
      if (mass <= 0.0) return out;
      for (const auto& atom : mu->atoms()) {
        const auto& y = std::get<EuclideanPoint>(atom.location.payload).coords;
        for (std::size_t i = 0; i < out.size(); ++i)
          out[i] += atom.weight * (y[i] - x[i]);
      }
      for (auto& c : out) c /= mass;
      return out;
    };
    f.sup_bound = [strength, radius](double) { return std::fabs(strength) * 2.0 * radius; };
    f.lip_bound = [strength](double) { return std::fabs(strength); };
    f.measure_lipschitz = std::fabs(strength) * (1.0 + 2.0 * radius);
    return f;
  }
  throw ConfigError("config key 'model.flow.field.kind' has unknown value '" +
                    kind + "'");
}

GrowthTerm growth_from_json(const json& block, double initial_mass) {
  if (block.is_null()) return zero_growth();
  const std::string kind = require_string(block, "kind", "model.growth.");
  if (kind == "none") return zero_growth();
  if (kind == "constant")
    return constant_growth(require_number(block, "rate", "model.growth."));
  if (kind == "logistic") {
    const double r = require_number(block, "rate", "model.growth.");
    const double K = require_number(block, "capacity", "model.growth.");
    const double radius =
        number_or(block, "mass_radius", 2.0 * std::max(initial_mass, K));
    return logistic_growth(r, K, radius);
  }
  throw ConfigError("config key 'model.growth.kind' has unknown value '" + kind +
                    "'");
}

HeterogeneityKernel kernel_from_json(const json& block, const SpacePtr& space) {
  if (block.is_null()) return zero_kernel(space);
  const std::string kind = require_string(block, "kind", "model.kernel.");
  if (kind == "none") return zero_kernel(space);
  if (kind == "point_jump") {
    const double rate = require_number(block, "rate", "model.kernel.");
    double lip = 0.0;
    auto jump = jump_from_json(require(block, "jump", "model.kernel."), space, &lip);
    return point_jump_kernel(space, rate, std::move(jump), lip);
  }
  throw ConfigError("config key 'model.kernel.kind' has unknown value '" + kind +
                    "'");
}

InfluxTerm influx_from_json(const json& block, const SpacePtr& space) {
  if (block.is_null()) return zero_influx(space);
  const std::string kind = require_string(block, "kind", "model.influx.");
  if (kind == "none") return zero_influx(space);
  if (kind == "point_source") {
    const double rate = require_number(block, "rate", "model.influx.");
    const Point source =
        location_from_json(require(block, "location", "model.influx."), *space);
    return point_influx(space, rate, source);
  }
  throw ConfigError("config key 'model.influx.kind' has unknown value '" + kind +
                    "'");
}

void flow_from_json(const json& block, ModelFunctions& model) {
  const std::string kind = require_string(block, "kind", "model.flow.");
  if (kind == "identity") {
    model.flow = identity_flow();
    return;
  }
  if (kind == "rotation") {
    model.flow = rotation_flow(model.space,
                               require_number(block, "omega", "model.flow."));
    return;
  }
  if (kind == "graph_drift") {
    const double speed = require_number(block, "speed", "model.flow.");
    const std::string policy_name =
        block.contains("policy") ? block.at("policy").get<std::string>() : "absorb";
    VertexPolicy policy;
    if (policy_name == "absorb")
      policy = VertexPolicy::Absorb;
    else if (policy_name == "route")
      policy = VertexPolicy::Route;
    else
      throw ConfigError("config key 'model.flow.policy' must be absorb or route");
    std::map<int, int> routing;
    if (block.contains("routing"))
      for (const auto& [vertex, edge] : block.at("routing").items())
        routing[std::stoi(vertex)] = edge.get<int>();
    try {
      model.flow = graph_drift_flow(model.space, speed, policy, std::move(routing));
    } catch (const std::invalid_argument& err) {
      throw ConfigError(std::string("config key 'model.flow.routing': ") +
                        err.what());
    }
    return;
  }
  if (kind == "shift") {
    model.flow = shift_flow(model.space,
                            number_array(require(block, "velocity", "model.flow."),
                                         "model.flow.velocity"));
    return;
  }
  if (kind == "ode") {
    if (model.space->kind() != SpaceKind::Euclidean)
      throw ConfigError("config key 'model.flow.kind': ode needs a Euclidean space");
    const int substeps = block.contains("substeps_per_unit")
                             ? block.at("substeps_per_unit").get<int>()
                             : 100;
    VectorField field = field_from_json(require(block, "field", "model.flow."),
                                        model.space->as_euclidean().dimension);
    model.flow_measure_lip = field.measure_lipschitz;
    model.flow = ode_flow(model.space, field, substeps);
    model.field = std::move(field);
    return;
  }
  throw ConfigError("config key 'model.flow.kind' has unknown value '" + kind +
                    "'");
}

}  // namespace

Scenario load_scenario(const json& config) {
  if (!config.is_object()) throw ConfigError("config root must be an object");
  if (!config.contains("schema") || config.at("schema") != 1)
    throw ConfigError("config key 'schema' must be 1");

  Scenario s;
  s.space = space_from_json(require(config, "space", ""));

  const json& initial = require(config, "initial", "");
  const json& atoms_json = require(initial, "atoms", "initial.");
  std::vector<Atom> atoms;
  for (const auto& a : atoms_json) {
    const Point loc = location_from_json(require(a, "location", "initial.atoms."),
                                         *s.space);
    atoms.push_back({loc, require_number(a, "weight", "initial.atoms.")});
  }
  try {
    s.initial = AtomicMeasure(s.space, std::move(atoms));
  } catch (const std::invalid_argument& err) {
    throw ConfigError(std::string("config key 'initial.atoms': ") + err.what());
  }

  const json& model = require(config, "model", "");
  s.model.space = s.space;
  s.model.growth = growth_from_json(model.contains("growth") ? model.at("growth") : json(),
                                    s.initial.tv_norm());
  s.model.kernel =
      kernel_from_json(model.contains("kernel") ? model.at("kernel") : json(), s.space);
  s.model.influx =
      influx_from_json(model.contains("influx") ? model.at("influx") : json(), s.space);
  flow_from_json(require(model, "flow", "model."), s.model);
  const bool logistic = model.contains("growth") && model.at("growth").is_object() &&
                        model.at("growth").value("kind", "") == "logistic";
  const bool aggregating = s.model.flow_measure_lip > 0.0;
  s.model.measure_dependent = logistic || aggregating;

  const json& solver = require(config, "solver", "");
  s.solver.dt = require_number(solver, "dt", "solver.");
  s.solver.t_end = require_number(solver, "t_end", "solver.");
  if (!(s.solver.t_end > 0.0))
    throw ConfigError("config key 'solver.t_end' must be positive");
  s.solver.tol_fp = number_or(solver, "tol_fp", 1e-8);
  s.solver.max_iterations =
      solver.contains("max_iterations") ? solver.at("max_iterations").get<int>() : 50;
  s.solver.merge_radius = number_or(solver, "merge_radius", 0.0);
  s.solver.weight_floor = number_or(solver, "weight_floor", 0.0);
  if (solver.contains("lambda")) s.solver.lambda = solver.at("lambda").get<double>();
  if (solver.contains("trapezoid_growth"))
    s.solver.trapezoid_growth = solver.at("trapezoid_growth").get<bool>();
  s.mode = solver.contains("mode") ? solver.at("mode").get<std::string>() : "auto";
  if (s.mode != "auto" && s.mode != "linear" && s.mode != "nonlinear")
    throw ConfigError("config key 'solver.mode' must be auto, linear or nonlinear");

  if (config.contains("output")) {
    const json& out = config.at("output");
    s.snapshots_path = out.value("snapshots", "");
    s.diagnostics_path = out.value("diagnostics", "");
    s.consistency_path = out.value("consistency", "");
  }
  return s;
}

namespace {

void apply_override(json& config, const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override '" + spec + "' must look like key=value");
  const std::string path = spec.substr(0, eq);
  const std::string raw = spec.substr(eq + 1);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;

  json* node = &config;
  std::size_t start = 0;
  for (;;) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot - start);
    if (key.empty()) throw ConfigError("override '" + spec + "' has an empty key");
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

}  // namespace

Scenario load_scenario_file(const std::string& path,
                            const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json config = json::parse(in, nullptr, false);
  if (config.is_discarded())
    throw ConfigError("config file '" + path + "' is not valid JSON");
  for (const auto& o : overrides) apply_override(config, o);
  return load_scenario(config);
}

std::string location_repr(const Point& p) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, EuclideanPoint>) {
          std::string out;
          for (std::size_t i = 0; i < v.coords.size(); ++i) {
            if (i) out += ',';
            out += fmt17(v.coords[i]);
          }
          return out;
        } else if constexpr (std::is_same_v<T, CirclePoint>) {
          return fmt17(v.angle);
        } else if constexpr (std::is_same_v<T, GraphPoint>) {
          return std::to_string(v.edge) + ":" + fmt17(v.offset);
        } else if constexpr (std::is_same_v<T, DiscretePoint>) {
          return std::to_string(v.index);
        } else {
          std::string out;
          for (std::size_t i = 0; i < v.samples.size(); ++i) {
            if (i) out += ',';
            out += fmt17(v.samples[i]);
          }
          return out;
        }
      },
      p.payload);
}

namespace {

std::vector<double> parse_number_list(const std::string& s) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const std::string tok =
        s.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    out.push_back(std::stod(tok));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

Point parse_location_repr(const std::string& repr, const MetricSpace& space) {
  switch (space.kind()) {
    case SpaceKind::Euclidean:
      return Point::euclidean(parse_number_list(repr));
    case SpaceKind::Circle:
      return Point::circle(std::stod(repr));
    case SpaceKind::Discrete:
      return Point::discrete(std::stoi(repr));
    case SpaceKind::Graph: {
      const auto colon = repr.find(':');
      if (colon == std::string::npos)
        throw std::invalid_argument("graph location must look like edge:offset");
      return Point::graph(std::stoi(repr.substr(0, colon)),
                          std::stod(repr.substr(colon + 1)));
    }
    case SpaceKind::Trajectory:
      return Point::trajectory(parse_number_list(repr));
  }
  throw std::invalid_argument("unsupported space kind");
}

void write_snapshots_csv(const std::string& path, const MeasurePath& measure_path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write snapshot file '" + path + "'");
  out << "time,atom,location,weight\n";
  for (std::size_t k = 0; k < measure_path.size(); ++k) {
    const double t = measure_path.grid()[k];
    const auto& atoms = measure_path.at(k).atoms();
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      std::string loc = location_repr(atoms[i].location);
      if (loc.find(',') != std::string::npos) loc = "\"" + loc + "\"";
      out << fmt17(t) << ',' << i << ',' << loc << ',' << fmt17(atoms[i].weight)
          << '\n';
    }
  }
}

namespace {

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace

MeasurePath read_snapshots_csv(const std::string& path, SpacePtr space) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open snapshot file '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line.rfind("time,atom,location,weight", 0) != 0)
    throw std::runtime_error("snapshot file '" + path + "' has an unexpected header");

  std::vector<double> grid;
  std::vector<std::vector<Atom>> snapshots;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_row(line);
    if (fields.size() != 4)
      throw std::runtime_error("snapshot row with wrong column count: " + line);
    const double t = std::stod(fields[0]);
    if (grid.empty() || t != grid.back()) {
      grid.push_back(t);
      snapshots.emplace_back();
    }
    snapshots.back().push_back(
        {parse_location_repr(fields[2], *space), std::stod(fields[3])});
  }
  std::vector<AtomicMeasure> measures;
  measures.reserve(snapshots.size());
  for (auto& atoms : snapshots)
    measures.emplace_back(space, std::move(atoms));
  return MeasurePath(std::move(grid), std::move(measures));
}

json diagnostics_to_json(const SolverDiagnostics& diag) {
  json j;
  j["apriori_bound"] = diag.apriori_bound;
  j["apriori_bound_ok"] = diag.apriori_bound_ok;
  j["compaction_loss"] = diag.compaction_loss;
  j["compaction_moved"] = diag.compaction_moved;
  j["contraction_constant"] = diag.contraction_constant;
  j["iterations"] = diag.iterations;
  j["lambda"] = diag.lambda;
  j["mass_timeline"] = diag.mass_timeline;
  j["narrow_modulus"] = diag.narrow_modulus;
  j["residuals"] = diag.residuals;
  return j;
}

json diagnostics_to_json(const NonlinearDiagnostics& diag) {
  json j;
  j["lambda"] = diag.lambda;
  j["linear"] = diagnostics_to_json(diag.linear);
  j["mass_radius"] = diag.mass_radius;
  j["model_constant"] = diag.model_constant;
  j["outer_iterations"] = diag.outer_iterations;
  j["outer_residuals"] = diag.outer_residuals;
  j["radius_respected"] = diag.radius_respected;
  return j;
}

json consistency_to_json(const ConsistencyReport& report) {
  json j;
  j["cutoff_inner"] = report.cutoff_inner;
  j["cutoff_outer"] = report.cutoff_outer;
  json entries = json::array();
  for (const auto& e : report.entries) {
    json item;
    item["dts"] = e.dts;
    item["order"] = e.order;
    item["residuals"] = e.residuals;
    item["test_function"] = e.test_function;
    entries.push_back(std::move(item));
  }
  j["entries"] = std::move(entries);
  return j;
}

json flat_lp_to_json(const FlatProblem& problem, const FlatSolution& solution) {
  json j;
  json support = json::array();
  for (const auto& p : problem.support) support.push_back(location_repr(p));
  j["coefficients"] = problem.coeff;
  j["optimal_psi"] = solution.optimal_psi;
  j["support"] = std::move(support);
  j["value"] = solution.value;
  return j;
}

RunOutcome run_scenario(const Scenario& scenario) {
  ValidationConfig vcfg;
  vcfg.t_end = scenario.solver.t_end;
  const ValidationReport report = validate_assumptions(scenario.model, vcfg);
  if (!report.valid())
    throw ConfigError("model violates its declared bounds (worst ratio " +
                      std::to_string(report.worst_ratio()) + ")");

  const bool nonlinear = scenario.mode == "nonlinear" ||
                         (scenario.mode == "auto" && scenario.model.measure_dependent);
  RunOutcome outcome;
  if (nonlinear) {
    NonlinearResult result =
        solve_nonlinear(scenario.initial, scenario.model, scenario.solver);
    outcome.path = std::move(result.path);
    outcome.diagnostics = diagnostics_to_json(result.diagnostics);
  } else {
    SolveResult result = solve_linear(scenario.initial, scenario.model, scenario.solver);
    outcome.path = std::move(result.path);
    outcome.diagnostics = diagnostics_to_json(result.diagnostics);
  }

  if (!scenario.snapshots_path.empty())
    write_snapshots_csv(scenario.snapshots_path, outcome.path);
  if (!scenario.diagnostics_path.empty()) {
    std::ofstream out(scenario.diagnostics_path);
    if (!out)
      throw std::runtime_error("cannot write diagnostics file '" +
                               scenario.diagnostics_path + "'");
    out << outcome.diagnostics.dump(2) << '\n';
  }
  if (!scenario.consistency_path.empty()) {
    if (scenario.space->kind() == SpaceKind::Euclidean && scenario.model.field) {
      const std::vector<double> dts = {scenario.solver.dt, scenario.solver.dt / 2.0,
                                       scenario.solver.dt / 4.0};
      const ConsistencyReport creport =
          consistency_report(scenario.initial, scenario.model, scenario.solver, dts);
      std::ofstream out(scenario.consistency_path);
      if (!out)
        throw std::runtime_error("cannot write consistency file '" +
                                 scenario.consistency_path + "'");
      out << consistency_to_json(creport).dump(2) << '\n';
    }
  }
  return outcome;
}

}  // namespace flatpop
