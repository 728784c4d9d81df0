#include "cso/config.hpp"

#include <cmath>
#include <fstream>

namespace cso {

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

namespace {

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("bad field '") + key + "': " + e.what());
  }
}

template <class T>
T get_required(const Json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("missing field '") + key + "'");
  return get_or<T>(j, key, T{});
}

void reject_unknown(const Json& j, std::initializer_list<const char*> allowed, const char* where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw ConfigError(std::string(where) + ": unknown field '" + it.key() + "'");
  }
}

Vector vector_field(const Json& j, const char* key, int d) {
  if (!j.contains(key)) {
    if (d < 1) throw ConfigError("d must be >= 1");
    return Vector::Constant(d, 1.0 / std::sqrt(static_cast<double>(d)));
  }
  const auto v = get_or<std::vector<double>>(j, key, {});
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Json vector_json(const Vector& v) {
  return Json(std::vector<double>(v.data(), v.data() + v.size()));
}

template <class S>
S gaussian_spec(const Json& j, const char* where) {
  reject_unknown(j, {"type", "d", "sigma_xi2", "sigma_eta2", "x_star", "domain_radius"}, where);
  S s;
  s.d = get_or<int>(j, "d", s.d);
  s.sigma_xi2 = get_or<double>(j, "sigma_xi2", s.sigma_xi2);
  s.sigma_eta2 = get_or<double>(j, "sigma_eta2", s.sigma_eta2);
  s.x_star = vector_field(j, "x_star", s.d);
  s.domain_radius = get_or<double>(j, "domain_radius", s.domain_radius);
  return s;
}

}  // namespace

InstanceSpec instance_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("instance must be a JSON object");
  const auto type = get_required<std::string>(j, "type");
  if (type == "RobustLogistic") return gaussian_spec<RobustLogisticSpec>(j, "RobustLogistic");
  if (type == "IndependentLogistic")
    return gaussian_spec<IndependentLogisticSpec>(j, "IndependentLogistic");
  if (type == "LavRegression") {
    reject_unknown(j, {"type", "d", "sigma_xi2", "sigma_eta2", "x_star", "smoothing", "domain_radius"},
                   "LavRegression");
    LavRegressionSpec s;
    s.d = get_or<int>(j, "d", s.d);
    s.sigma_xi2 = get_or<double>(j, "sigma_xi2", s.sigma_xi2);
    s.sigma_eta2 = get_or<double>(j, "sigma_eta2", s.sigma_eta2);
    s.x_star = vector_field(j, "x_star", s.d);
    s.domain_radius = get_or<double>(j, "domain_radius", s.domain_radius);
    if (j.contains("smoothing")) {
      const Json& sm = j.at("smoothing");
      if (sm.is_string() && sm.get<std::string>() == "None") {
        s.smoothing = NoSmoothing{};
      } else if (sm.is_object() && get_required<std::string>(sm, "type") == "Huber") {
        reject_unknown(sm, {"type", "gamma"}, "smoothing");
        s.smoothing = HuberSmoothing{get_required<double>(sm, "gamma")};
      } else if (sm.is_object() && sm.at("type") == "None") {
        s.smoothing = NoSmoothing{};
      } else {
        throw ConfigError("smoothing must be \"None\" or {\"type\": \"Huber\", \"gamma\": g}");
      }
    }
    return s;
  }
  if (type == "Huber1D") {
    reject_unknown(j, {"type", "gamma", "sigma_eta2", "domain_radius"}, "Huber1D");
    Huber1DSpec s;
    s.gamma = get_or<double>(j, "gamma", s.gamma);
    s.sigma_eta2 = get_or<double>(j, "sigma_eta2", s.sigma_eta2);
    s.domain_radius = get_or<double>(j, "domain_radius", s.domain_radius);
    return s;
  }
  if (type == "SineQG") {
    reject_unknown(j, {"type", "mu", "inner_offset", "domain_radius"}, "SineQG");
    SineQGSpec s;
    s.mu = get_or<double>(j, "mu", s.mu);
    s.inner_offset = get_or<double>(j, "inner_offset", s.inner_offset);
    s.domain_radius = get_or<double>(j, "domain_radius", s.domain_radius);
    return s;
  }
  throw ConfigError("unknown instance type: " + type);
}

Json to_json(const InstanceSpec& spec) {
  struct Visitor {
    Json gaussian(const char* type, int d, double sxi, double seta, const Vector& xs, double R) const {
      return Json{{"type", type}, {"d", d}, {"sigma_xi2", sxi}, {"sigma_eta2", seta},
                  {"x_star", vector_json(xs)}, {"domain_radius", R}};
    }
    Json operator()(const RobustLogisticSpec& s) const {
      return gaussian("RobustLogistic", s.d, s.sigma_xi2, s.sigma_eta2, s.x_star, s.domain_radius);
    }
    Json operator()(const IndependentLogisticSpec& s) const {
      return gaussian("IndependentLogistic", s.d, s.sigma_xi2, s.sigma_eta2, s.x_star,
                      s.domain_radius);
    }
    Json operator()(const LavRegressionSpec& s) const {
      Json j = gaussian("LavRegression", s.d, s.sigma_xi2, s.sigma_eta2, s.x_star, s.domain_radius);
      if (const auto* h = std::get_if<HuberSmoothing>(&s.smoothing))
        j["smoothing"] = Json{{"type", "Huber"}, {"gamma", h->gamma}};
      else
        j["smoothing"] = "None";
      return j;
    }
    Json operator()(const Huber1DSpec& s) const {
      return Json{{"type", "Huber1D"}, {"gamma", s.gamma}, {"sigma_eta2", s.sigma_eta2},
                  {"domain_radius", s.domain_radius}};
    }
    Json operator()(const SineQGSpec& s) const {
      return Json{{"type", "SineQG"}, {"mu", s.mu}, {"inner_offset", s.inner_offset},
                  {"domain_radius", s.domain_radius}};
    }
  };
  return std::visit(Visitor{}, spec);
}

OracleSpec oracle_from_json(const Json& j) {
  if (j.is_string()) return oracle_from_json(Json{{"type", j.get<std::string>()}});
  if (!j.is_object()) throw ConfigError("oracle must be a JSON object");
  const auto type = get_required<std::string>(j, "type");
  if (type == "ClosedForm") {
    reject_unknown(j, {"type"}, "oracle");
    return ClosedFormOracle{};
  }
  if (type == "MonteCarlo") {
    reject_unknown(j, {"type", "N", "seed"}, "oracle");
    MonteCarloOracle o;
    o.samples = get_or<std::int64_t>(j, "N", o.samples);
    o.seed = get_or<std::uint64_t>(j, "seed", o.seed);
    if (o.samples < 2) throw ConfigError("oracle: N must be >= 2");
    return o;
  }
  throw ConfigError("unknown oracle type: " + type);
}

Json to_json(const OracleSpec& oracle) {
  if (std::holds_alternative<ClosedFormOracle>(oracle)) return Json{{"type", "ClosedForm"}};
  const auto& mc = std::get<MonteCarloOracle>(oracle);
  return Json{{"type", "MonteCarlo"}, {"N", mc.samples}, {"seed", mc.seed}};
}

SolverConfig solver_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("solver must be a JSON object");
  reject_unknown(j, {"method", "max_iters", "tolerance", "initial_point", "armijo_shrink",
                     "armijo_slope", "step_constant", "stall_window", "record_trace"},
                 "solver");
  SolverConfig c;
  if (j.contains("method")) c.method = parse_solver_method(get_required<std::string>(j, "method"));
  c.max_iters = get_or<std::int64_t>(j, "max_iters", c.max_iters);
  c.tolerance = get_or<double>(j, "tolerance", c.tolerance);
  if (j.contains("initial_point")) {
    const auto v = get_required<std::vector<double>>(j, "initial_point");
    c.initial_point = Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
  }
  c.armijo_shrink = get_or<double>(j, "armijo_shrink", c.armijo_shrink);
  c.armijo_slope = get_or<double>(j, "armijo_slope", c.armijo_slope);
  if (j.contains("step_constant")) c.step_constant = get_required<double>(j, "step_constant");
  c.stall_window = get_or<std::int64_t>(j, "stall_window", c.stall_window);
  c.record_trace = get_or<bool>(j, "record_trace", c.record_trace);
  validate(c);
  return c;
}

Strategy strategy_from_json(const Json& j) {
  if (j.is_string()) return parse_strategy(j.get<std::string>());
  if (j.is_number()) return exponent_from_double(j.get<double>());
  if (j.is_object()) {
    if (j.contains("n")) return FixedN{get_required<std::int64_t>(j, "n")};
    if (j.contains("alpha")) return strategy_from_json(j.at("alpha"));
  }
  throw ConfigError("bad strategy entry: " + j.dump());
}

Scheme parse_scheme(const std::string& s) {
  if (s == "conditional" || s == "cond" || s == "Conditional") return Scheme::Conditional;
  if (s == "independent" || s == "indep" || s == "Independent") return Scheme::Independent;
  throw ConfigError("unknown scheme: " + s);
}

ExperimentConfig experiment_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("experiment config must be a JSON object");
  reject_unknown(j, {"instance", "schemes", "scheme", "budgets", "strategies", "replications",
                     "master_seed", "solver", "oracle", "regularizer", "sweep", "record_wall_time"},
                 "experiment");
  ExperimentConfig c;
  if (!j.contains("instance")) throw ConfigError("missing field 'instance'");
  c.instance = instance_from_json(j.at("instance"));
  if (j.contains("schemes")) {
    c.schemes.clear();
    for (const auto& s : j.at("schemes")) {
      if (!s.is_string()) throw ConfigError("schemes must be strings");
      c.schemes.push_back(parse_scheme(s.get<std::string>()));
    }
  } else if (j.contains("scheme")) {
    c.schemes = {parse_scheme(get_required<std::string>(j, "scheme"))};
  }
  if (j.contains("budgets")) c.budgets = get_required<std::vector<std::int64_t>>(j, "budgets");
  if (j.contains("strategies")) {
    c.strategies.clear();
    for (const auto& s : j.at("strategies")) c.strategies.push_back(strategy_from_json(s));
  }
  c.replications = get_or<std::int64_t>(j, "replications", c.replications);
  c.master_seed = get_or<std::uint64_t>(j, "master_seed", c.master_seed);
  if (j.contains("solver")) c.solver = solver_from_json(j.at("solver"));
  if (j.contains("oracle")) c.oracle = oracle_from_json(j.at("oracle"));
  c.regularizer = get_or<double>(j, "regularizer", c.regularizer);
  if (j.contains("sweep")) {
    const Json& s = j.at("sweep");
    const auto type = s.is_string() ? s.get<std::string>() : get_required<std::string>(s, "type");
    if (type == "BudgetSweep") {
      c.sweep = BudgetSweep{};
    } else if (type == "FixedBudgetVaryN") {
      reject_unknown(s, {"type", "T", "n_list"}, "sweep");
      c.sweep = FixedBudgetVaryN{get_required<std::int64_t>(s, "T"),
                                 get_required<std::vector<std::int64_t>>(s, "n_list")};
    } else {
      throw ConfigError("unknown sweep type: " + type);
    }
  }
  c.record_wall_time = get_or<bool>(j, "record_wall_time", c.record_wall_time);
  validate(c);
  return c;
}

}  // namespace cso
