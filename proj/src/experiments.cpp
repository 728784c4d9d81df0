#include "cso/experiments.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "cso/config.hpp"
#include "cso/format.hpp"
#include "cso/parallel.hpp"

namespace cso {

std::vector<std::int64_t> default_budgets() {
  return {1000, 3162, 10000, 31623, 100000, 316228, 1000000};
}

std::vector<Strategy> default_strategies() {
  return {exponent(1, 4), exponent(1, 3), exponent(1, 2), exponent(2, 3)};
}

namespace {

// Budgets and strategies actually swept.
std::pair<std::vector<std::int64_t>, std::vector<Strategy>> grid(const ExperimentConfig& cfg) {
  if (const auto* f = std::get_if<FixedBudgetVaryN>(&cfg.sweep)) {
    std::vector<Strategy> s;
    for (auto n : f->n_list) s.push_back(FixedN{n});
    return {{f->T}, s};
  }
  return {cfg.budgets, cfg.strategies};
}

bool feasible(std::int64_t T, const Strategy& st, Scheme s) {
  try {
    allocate(T, st, s);
    return true;
  } catch (const ConfigError&) {
    return false;
  }
}

// Fixed-budget sweeps share one n_list across schemes; an n that leaves no
// inner sample under one scheme (conditional needs T >= 2n) is skipped there.
bool in_grid(const ExperimentConfig& cfg, std::int64_t T, const Strategy& st, Scheme s) {
  return std::holds_alternative<BudgetSweep>(cfg.sweep) || feasible(T, st, s);
}

}  // namespace

void validate(const ExperimentConfig& cfg) {
  if (cfg.replications < 1) throw ConfigError("experiment: replications must be >= 1");
  if (cfg.schemes.empty()) throw ConfigError("experiment: no schemes");
  if (!(cfg.regularizer >= 0.0)) throw ConfigError("experiment: regularizer must be >= 0");
  validate(cfg.solver);
  if (const auto* f = std::get_if<FixedBudgetVaryN>(&cfg.sweep)) {
    if (f->n_list.empty()) throw ConfigError("experiment: empty n_list");
    for (auto n : f->n_list)
      if (n >= f->T) throw ConfigError("experiment: n_list entries must be < T");
  } else {
    if (cfg.budgets.empty()) throw ConfigError("experiment: no budgets");
    if (cfg.strategies.empty()) throw ConfigError("experiment: no strategies");
    for (std::size_t i = 0; i < cfg.budgets.size(); ++i) {
      if (cfg.budgets[i] <= 0) throw ConfigError("experiment: budgets must be positive");
      if (i > 0 && cfg.budgets[i] <= cfg.budgets[i - 1])
        throw ConfigError("experiment: budgets must be sorted and distinct");
    }
  }
  const auto problem = build(cfg.instance);
  for (Scheme s : cfg.schemes)
    if (s == Scheme::Independent && !problem->independent_inner())
      throw ConfigError(problem->name() + ": independent scheme needs eta independent of xi");
  // Every allocation must be feasible before any work starts.
  const auto [budgets, strategies] = grid(cfg);
  for (const auto& st : strategies) {
    bool any = false;
    for (Scheme s : cfg.schemes)
      for (auto T : budgets) {
        if (std::holds_alternative<BudgetSweep>(cfg.sweep)) allocate(T, st, s);
        any = any || feasible(T, st, s);
      }
    if (!any) allocate(budgets.front(), st, cfg.schemes.front());
  }
}

ReferenceOptimum reference_optimum(const CsoProblem& problem, const OracleSpec& oracle,
                                   const SolverConfig& solver) {
  if (std::holds_alternative<ClosedFormOracle>(oracle)) {
    if (auto v = problem.analytic_optimal_value()) return {*v, 0.0, "analytic"};
    if (auto v = problem.closed_form_optimal_value()) return {*v, 0.0, "quadrature"};
    throw ConfigError(problem.name() + ": no closed-form optimal value");
  }
  if (auto v = problem.analytic_optimal_value()) return {*v, 0.0, "analytic"};

  const auto& mc = std::get<MonteCarloOracle>(oracle);
  constexpr std::int64_t kReferenceOuter = 100000;
  ConditionalDataset ds;
  ds.n = kReferenceOuter;
  ds.m = 1;
  ds.outer.resize(problem.xi_dimension(), kReferenceOuter);
  ds.inner.resize(problem.eta_dimension(), kReferenceOuter);
  Rng rng(mix64(mc.seed ^ 0x5eed5eed5eed5eedULL));
  for (std::int64_t i = 0; i < kReferenceOuter; ++i) {
    problem.sample_outer(rng, ds.outer.col(i));
    problem.conditional_eta_mean(ds.outer.col(i), ds.inner.col(i));
  }
  // Borrowing the problem is safe: the objective does not outlive this call.
  std::shared_ptr<const CsoProblem> alias(std::shared_ptr<const CsoProblem>{}, &problem);
  SaaObjective obj(alias, std::make_shared<const Dataset>(std::move(ds)));
  SolverConfig cfg = solver;
  cfg.tolerance = std::min(cfg.tolerance, 1e-8);
  cfg.max_iters = std::max<std::int64_t>(cfg.max_iters, 100000);
  const SolveResult r = solve_saa(obj, cfg);
  const ObjectiveEstimate est = true_objective(problem, r.x_hat, oracle);
  return {est.value, est.std_error, "reference-solve"};
}

namespace {

std::string oracle_key(const InstanceSpec& spec, const OracleSpec& oracle) {
  Json key;
  key["instance"] = to_json(spec);
  key["oracle"] = to_json(oracle);
  return key.dump();
}

ReferenceOptimum cached_reference(const ExperimentConfig& cfg, const CsoProblem& problem,
                                  const std::optional<std::filesystem::path>& cache) {
  const std::string key = oracle_key(cfg.instance, cfg.oracle);
  if (cache && std::filesystem::exists(*cache)) {
    try {
      const Json j = read_json_file(*cache);
      if (j.value("key", std::string{}) == key)
        return {j.at("fstar").get<double>(), j.at("std_error").get<double>(),
                j.at("method").get<std::string>()};
    } catch (const ConfigError&) {
      // Unreadable cache: recompute and overwrite.
    }
  }
  ReferenceOptimum ref = reference_optimum(problem, cfg.oracle, cfg.solver);
  if (cache) {
    Json j;
    j["key"] = key;
    j["fstar"] = ref.value;
    j["std_error"] = ref.std_error;
    j["method"] = ref.method;
    std::ofstream out(*cache);
    out << j.dump(2) << '\n';
    if (!out) throw RuntimeFailure("cannot write " + cache->string());
  }
  return ref;
}

struct Job {
  Scheme scheme;
  Allocation alloc;
  std::string strategy;
  std::int64_t replication;
  std::uint64_t seed;
};

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
  validate(cfg);
  const auto problem = build(cfg.instance);
  const std::string tag = instance_tag(cfg.instance);
  ExperimentReport report;
  report.fstar = cached_reference(cfg, *problem, options.fstar_cache);

  const auto [budgets, strategies] = grid(cfg);
  std::vector<Job> jobs;
  for (Scheme s : cfg.schemes)
    for (auto T : budgets)
      for (const auto& st : strategies) {
        if (!in_grid(cfg, T, st, s)) continue;
        const Allocation a = allocate(T, st, s);
        const std::string label = strategy_label(st);
        const std::string cell = std::string(to_string(s)) + "|" + std::to_string(T) + "|" + label;
        for (std::int64_t r = 0; r < cfg.replications; ++r)
          jobs.push_back({s, a, label, r, derive_seed(cfg.master_seed, cell,
                                                      static_cast<std::uint64_t>(r))});
      }

  report.cells.resize(jobs.size());
  parallel_for(static_cast<std::int64_t>(jobs.size()), options.threads, [&](std::int64_t idx) {
    const Job& job = jobs[static_cast<std::size_t>(idx)];
    CellRecord& rec = report.cells[static_cast<std::size_t>(idx)];
    rec.instance = tag;
    rec.scheme = job.scheme;
    rec.T = job.alloc.T;
    rec.strategy = job.strategy;
    rec.n = job.alloc.n;
    rec.m = job.alloc.m;
    rec.leftover = job.alloc.leftover;
    rec.replication = job.replication;
    rec.seed = job.seed;
    const auto start = std::chrono::steady_clock::now();
    Vector x_hat;
    try {
      auto ds = std::make_shared<const Dataset>(
          sample(*problem, job.scheme, job.alloc.n, job.alloc.m, job.seed));
      SaaObjective obj(problem, ds, cfg.regularizer);
      const SolveResult res = solve_saa(obj, cfg.solver);
      rec.iters = res.iterations;
      x_hat = res.x_hat;
    } catch (const RuntimeFailure& e) {
      rec.failed = true;
      rec.failure = e.what();
      rec.error = std::numeric_limits<double>::quiet_NaN();
    }
    // Oracle failures are not cell failures; they propagate.
    if (!rec.failed) rec.error = true_objective(*problem, x_hat, cfg.oracle).value - report.fstar.value;
    if (cfg.record_wall_time)
      rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                        .count();
  });
  report.summary = summarize(report.cells);
  return report;
}

std::vector<SummaryRow> summarize(const std::vector<CellRecord>& cells) {
  std::vector<SummaryRow> rows;
  std::size_t i = 0;
  while (i < cells.size()) {
    const CellRecord& head = cells[i];
    SummaryRow row;
    row.instance = head.instance;
    row.scheme = head.scheme;
    row.T = head.T;
    row.strategy = head.strategy;
    std::vector<double> errs;
    std::size_t j = i;
    for (; j < cells.size(); ++j) {
      const CellRecord& c = cells[j];
      if (c.instance != head.instance || c.scheme != head.scheme || c.T != head.T ||
          c.strategy != head.strategy)
        break;
      if (c.failed)
        ++row.failures;
      else
        errs.push_back(c.error);
    }
    row.count = static_cast<std::int64_t>(errs.size());
    if (!errs.empty()) {
      double sum = 0.0;
      for (double e : errs) sum += e;
      row.mean_error = sum / static_cast<double>(errs.size());
      if (errs.size() > 1) {
        double ss = 0.0;
        for (double e : errs) ss += (e - row.mean_error) * (e - row.mean_error);
        row.std_dev = std::sqrt(ss / static_cast<double>(errs.size() - 1));
        row.std_error_of_mean = row.std_dev / std::sqrt(static_cast<double>(errs.size()));
      }
    } else {
      row.mean_error = std::numeric_limits<double>::quiet_NaN();
    }
    rows.push_back(row);
    i = j;
  }
  return rows;
}

std::string raw_csv(const ExperimentReport& report) {
  std::ostringstream os;
  os << "instance,scheme,T,strategy,n,m,leftover,replication,seed,error,iters,wall_ms\n";
  for (const auto& c : report.cells) {
    os << c.instance << ',' << to_string(c.scheme) << ',' << c.T << ',' << c.strategy << ','
       << c.n << ',' << c.m << ',' << c.leftover << ',' << c.replication << ',' << c.seed << ','
       << format_double(c.error) << ',' << c.iters << ',' << format_double(c.wall_ms) << '\n';
  }
  return os.str();
}

std::string summary_csv(const ExperimentReport& report) {
  std::ostringstream os;
  os << "instance,scheme,T,strategy,mean_error,std_error_of_mean,std_dev,count,failures\n";
  for (const auto& r : report.summary) {
    os << r.instance << ',' << to_string(r.scheme) << ',' << r.T << ',' << r.strategy << ','
       << format_double(r.mean_error) << ',' << format_double(r.std_error_of_mean) << ','
       << format_double(r.std_dev) << ',' << r.count << ',' << r.failures << '\n';
  }
  return os.str();
}

namespace {

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
  out.close();
  if (!out) throw RuntimeFailure("cannot write " + p.string());
}

}  // namespace

CsvPaths emit_csv(const ExperimentReport& report, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw RuntimeFailure("cannot create " + out_dir.string() + ": " + ec.message());
  CsvPaths paths{out_dir / "raw.csv", out_dir / "summary.csv"};
  write_file(paths.raw, raw_csv(report));
  write_file(paths.summary, summary_csv(report));
  return paths;
}

MonteCarloEstimate huber1d_monte_carlo(double gamma, double sigma2, std::int64_t m,
                                       std::int64_t replications, std::uint64_t seed,
                                       int threads) {
  if (replications < 2) throw ConfigError("huber1d_monte_carlo: needs >= 2 replications");
  if (m < 1) throw ConfigError("huber1d_monte_carlo: m must be >= 1");
  const auto problem = build(Huber1DSpec{gamma, sigma2});
  const std::string cell = "huber1d|" + std::to_string(m);
  std::vector<double> errs(static_cast<std::size_t>(replications));
  parallel_for(replications, threads, [&](std::int64_t r) {
    const Dataset ds =
        sample_independent(*problem, 1, m, derive_seed(seed, cell, static_cast<std::uint64_t>(r)));
    const Vector x = Vector::Constant(1, huber1d_closed_form(*problem, ds));
    errs[static_cast<std::size_t>(r)] = *problem->closed_form_objective(x);
  });
  double mean = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < errs.size(); ++i) {
    const double d = errs[i] - mean;
    mean += d / static_cast<double>(i + 1);
    m2 += d * (errs[i] - mean);
  }
  const auto R = static_cast<double>(replications);
  return {mean, std::sqrt(m2 / (R - 1.0) / R), replications};
}

}  // namespace cso
