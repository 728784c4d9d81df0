#include "cso/cli.hpp"

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "cso/analysis.hpp"
#include "cso/config.hpp"
#include "cso/experiments.hpp"

namespace cso {

namespace {

using OrderedJson = nlohmann::ordered_json;

int thread_count(std::optional<int> flag) {
  if (flag) {
    if (*flag < 1) throw ConfigError("--threads must be >= 1");
    return *flag;
  }
  if (const char* env = std::getenv("CSO_SAA_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1) throw ConfigError("CSO_SAA_THREADS must be a positive integer");
    return static_cast<int>(v);
  }
  return 1;
}

struct RunArgs {
  std::string config, out;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  bool timing = false;
};

int do_run(const RunArgs& a, std::ostream& out) {
  ExperimentConfig cfg = experiment_from_json(read_json_file(a.config));
  if (a.seed) cfg.master_seed = *a.seed;
  if (a.timing) cfg.record_wall_time = true;
  RunOptions opt;
  opt.threads = thread_count(a.threads);
  std::error_code ec;
  std::filesystem::create_directories(a.out, ec);
  if (ec) throw RuntimeFailure("cannot create " + a.out + ": " + ec.message());
  opt.fstar_cache = std::filesystem::path(a.out) / "fstar.json";
  const ExperimentReport rep = run_experiment(cfg, opt);
  const CsvPaths paths = emit_csv(rep, a.out);
  std::int64_t failures = 0;
  for (const auto& c : rep.cells) failures += c.failed ? 1 : 0;
  OrderedJson j;
  j["raw"] = paths.raw.string();
  j["summary"] = paths.summary.string();
  j["cells"] = rep.cells.size();
  j["failures"] = failures;
  j["fstar"] = rep.fstar.value;
  j["fstar_method"] = rep.fstar.method;
  out << j.dump() << '\n';
  return 0;
}

struct AllocateArgs {
  std::int64_t budget = 0;
  std::string alpha, scheme;
};

int do_allocate(const AllocateArgs& a, std::ostream& out) {
  const Allocation al = allocate(a.budget, parse_strategy(a.alpha), parse_scheme(a.scheme));
  OrderedJson j;
  j["n"] = al.n;
  j["m"] = al.m;
  j["leftover"] = al.leftover;
  out << j.dump() << '\n';
  return 0;
}

struct ProbeArgs {
  std::string config;
  std::string format = "json";
  std::optional<int> threads;
};

int do_mse_probe(const ProbeArgs& a, std::ostream& out) {
  const Json j = read_json_file(a.config);
  if (!j.contains("instance")) throw ConfigError("mse-probe: missing field 'instance'");
  const auto problem = build(instance_from_json(j.at("instance")));
  Vector x = Vector::Zero(problem->dimension());
  if (j.contains("x")) {
    const auto v = j.at("x").get<std::vector<double>>();
    x = Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
    if (x.size() != problem->dimension()) throw ConfigError("mse-probe: x has the wrong dimension");
  }
  const auto n = j.value("n", std::int64_t{10});
  const auto m = j.value("m", std::int64_t{10});
  const Scheme scheme = parse_scheme(j.value("scheme", std::string("conditional")));
  const auto reps = j.value("replications", std::int64_t{1000});
  const auto seed = j.value("seed", std::uint64_t{1});
  OracleSpec oracle = ClosedFormOracle{};
  if (j.contains("oracle"))
    oracle = oracle_from_json(j.at("oracle"));
  else if (!problem->closed_form_objective(x))
    oracle = MonteCarloOracle{};
  const MseProbeReport r = mse_probe(problem, x, n, m, scheme, reps, seed, oracle, thread_count(a.threads));
  if (a.format == "csv")
    out << mse_probe_csv_header() << '\n' << to_csv_row(r) << '\n';
  else
    out << to_json(r) << '\n';
  return 0;
}

struct HuberArgs {
  double gamma = 0.0, sigma2 = 1.0;
  std::int64_t m = 1;
  std::optional<std::int64_t> mc;
  std::uint64_t seed = 1;
  std::optional<int> threads;
};

int do_huber1d(const HuberArgs& a, std::ostream& out) {
  const Huber1DError e = huber1d_expected_error(a.gamma, a.sigma2, a.m);
  OrderedJson j;
  j["gamma"] = a.gamma;
  j["sigma2"] = a.sigma2;
  j["m"] = a.m;
  j["main"] = e.main;
  j["remainder_bound"] = e.remainder_bound;
  j["exact"] = e.exact;
  if (a.mc) {
    const MonteCarloEstimate mc =
        huber1d_monte_carlo(a.gamma, a.sigma2, a.m, *a.mc, a.seed, thread_count(a.threads));
    j["mc_mean"] = mc.mean;
    j["mc_std_error"] = mc.std_error;
    j["replications"] = mc.replications;
    j["in_sandwich"] = mc.mean >= e.main - 3.0 * mc.std_error &&
                       mc.mean <= e.main + e.remainder_bound + 3.0 * mc.std_error;
  }
  out << j.dump() << '\n';
  return 0;
}

TailVariant tail_from_json(const Json& j) {
  const auto v = j.value("variant", std::string("SubGaussian"));
  if (v == "SubGaussian") return SubGaussianTail{};
  if (v == "RateFunction") return RateFunctionTail{j.value("slack", 0.0)};
  if (v == "Vector") return VectorTail{j.value("k", 1), j.value("slack", 0.0)};
  throw ConfigError("unknown large-deviation variant: " + v);
}

int do_bounds(const std::string& path, std::ostream& out) {
  const Json j = read_json_file(path);
  const Regime regime = parse_regime(j.value("regime", std::string("CondLipschitz")));
  const double eps = j.value("epsilon", 0.1), alpha = j.value("alpha", 0.1);
  BoundInputs in;
  if (j.contains("instance")) {
    in = bound_inputs(*build(instance_from_json(j.at("instance"))), regime, eps, alpha);
  } else {
    in.regime = regime;
    in.epsilon = eps;
    in.alpha = alpha;
  }
  if (j.contains("constants")) {
    const Json& c = j.at("constants");
    in.lipschitz_outer = c.value("L_f", in.lipschitz_outer);
    in.lipschitz_inner = c.value("L_g", in.lipschitz_inner);
    if (c.contains("S")) in.smoothness = c.at("S").get<double>();
    in.bound_outer = c.value("M_f", in.bound_outer);
    in.bound_inner = c.value("M_g", in.bound_inner);
    in.variance_outer = c.value("sigma_f2", in.variance_outer);
    in.variance_inner = c.value("sigma_g2", in.variance_inner);
    in.diameter = c.value("D_X", in.diameter);
    in.dimension = c.value("d", in.dimension);
    in.inner_dimension = c.value("k", in.inner_dimension);
    if (c.contains("mu")) in.mu = c.at("mu").get<double>();
    in.delta = c.value("delta", in.delta);
  }
  in.absolute_constant = j.value("absolute_constant", in.absolute_constant);

  OrderedJson o;
  o["regime"] = to_string(regime);
  o["epsilon"] = eps;
  o["alpha"] = alpha;
  const SampleComplexity sc = sample_complexity(in);
  o["n_min"] = sc.n_min;
  o["m_min"] = sc.m_min;
  o["total"] = sc.total;
  if (j.contains("n") || j.contains("m")) {
    const bool smooth = j.value("smooth", in.smoothness.has_value());
    const BiasVarianceBounds b =
        bias_variance_bounds(in, j.value("n", std::int64_t{1}), j.value("m", std::int64_t{1}), smooth);
    o["bias_bound"] = b.bias_bound;
    o["var_bound"] = b.var_bound;
    o["mse_bound"] = b.mse_bound;
  }
  if (j.contains("large_deviation")) {
    const Json& ld = j.at("large_deviation");
    o["large_deviation_bound"] =
        large_deviation_bound(ld.value("n", std::int64_t{1}), ld.value("epsilon", eps),
                              ld.value("sigma2", 1.0), tail_from_json(ld));
  }
  o["note"] = "up to absolute constants";
  out << o.dump() << '\n';
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sample average approximation for conditional stochastic optimization", "cso_saa"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run an experiment and write raw.csv / summary.csv");
  run->add_option("--config", run_args.config, "Experiment config (JSON)")->required();
  run->add_option("--out", run_args.out, "Output directory")->required();
  run->add_option("--seed", run_args.seed, "Override the master seed");
  run->add_option("--threads", run_args.threads, "Worker threads (default $CSO_SAA_THREADS or 1)");
  run->add_flag("--timing", run_args.timing, "Record wall time per cell");

  AllocateArgs alloc_args;
  auto* alloc = app.add_subcommand("allocate", "Split a budget into (n, m)");
  alloc->add_option("--budget", alloc_args.budget, "Total budget T")->required();
  alloc->add_option("--alpha", alloc_args.alpha, "Exponent, e.g. 0.5 or 1/2")->required();
  alloc->add_option("--scheme", alloc_args.scheme, "cond or indep")
      ->required()
      ->check(CLI::IsMember({"cond", "indep", "conditional", "independent"}));

  ProbeArgs probe_args;
  auto* probe = app.add_subcommand("mse-probe", "Bias / variance / MSE of the SAA objective at x");
  probe->add_option("--config", probe_args.config, "Probe config (JSON)")->required();
  probe->add_option("--format", probe_args.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  probe->add_option("--threads", probe_args.threads, "Worker threads");

  HuberArgs huber_args;
  auto* huber = app.add_subcommand("huber1d", "Expected SAA error of the one-dimensional Huber problem");
  huber->add_option("--gamma", huber_args.gamma, "Huber parameter (>= 0)")->required();
  huber->add_option("--sigma2", huber_args.sigma2, "Inner noise variance")->required();
  huber->add_option("--m", huber_args.m, "Inner sample count")->required();
  huber->add_option("--mc", huber_args.mc, "Monte Carlo replications");
  huber->add_option("--seed", huber_args.seed, "Monte Carlo seed");
  huber->add_option("--threads", huber_args.threads, "Worker threads");

  std::string bounds_config;
  auto* bounds = app.add_subcommand("bounds", "Sample-complexity and bias/variance bounds");
  bounds->add_option("--config", bounds_config, "Bounds config (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (*run) return do_run(run_args, out);
    if (*alloc) return do_allocate(alloc_args, out);
    if (*probe) return do_mse_probe(probe_args, out);
    if (*huber) return do_huber1d(huber_args, out);
    if (*bounds) return do_bounds(bounds_config, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 1;
  } catch (const nlohmann::json::exception& e) {
    err << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << '\n';
    return 2;
  }
  err << app.help();
  return 1;
}

int cli_main(int argc, const char* const* argv) { return cli_main(argc, argv, std::cout, std::cerr); }

}  // namespace cso
