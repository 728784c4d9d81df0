#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cso/instances.hpp"
#include "cso/sampling.hpp"
#include "cso/solve.hpp"

namespace cso {

struct BudgetSweep {};
// One budget, explicit outer sample sizes.
struct FixedBudgetVaryN {
  std::int64_t T = 10000;
  std::vector<std::int64_t> n_list;
};
using SweepMode = std::variant<BudgetSweep, FixedBudgetVaryN>;

std::vector<std::int64_t> default_budgets();
std::vector<Strategy> default_strategies();

struct ExperimentConfig {
  InstanceSpec instance = RobustLogisticSpec{};
  std::vector<Scheme> schemes{Scheme::Conditional};
  std::vector<std::int64_t> budgets = default_budgets();
  std::vector<Strategy> strategies = default_strategies();
  std::int64_t replications = 30;
  std::uint64_t master_seed = 1;
  SolverConfig solver;
  OracleSpec oracle = ClosedFormOracle{};
  double regularizer = 0.0;
  SweepMode sweep = BudgetSweep{};
  bool record_wall_time = false;
};

void validate(const ExperimentConfig& cfg);

struct CellRecord {
  std::string instance;
  Scheme scheme = Scheme::Conditional;
  std::int64_t T = 0;
  std::string strategy;
  std::int64_t n = 0;
  std::int64_t m = 0;
  std::int64_t leftover = 0;
  std::int64_t replication = 0;
  std::uint64_t seed = 0;
  double error = 0.0;  // F(x_hat) - F*, NaN for failed cells
  std::int64_t iters = 0;
  double wall_ms = 0.0;  // 0 unless wall time recording is on
  bool failed = false;
  std::string failure;
};

struct SummaryRow {
  std::string instance;
  Scheme scheme = Scheme::Conditional;
  std::int64_t T = 0;
  std::string strategy;
  double mean_error = 0.0;
  double std_error_of_mean = 0.0;
  double std_dev = 0.0;
  std::int64_t count = 0;
  std::int64_t failures = 0;
};

struct ReferenceOptimum {
  double value = 0.0;
  double std_error = 0.0;
  std::string method;  // "analytic", "quadrature" or "reference-solve"
};

struct ExperimentReport {
  std::vector<CellRecord> cells;  // canonical (scheme, T, strategy, replication) order
  std::vector<SummaryRow> summary;
  ReferenceOptimum fstar;
};

// F*. ClosedForm oracles use the analytic or quadrature value. MonteCarlo
// oracles use the analytic value when there is one; otherwise they solve a
// collapsed SAA (n = 1e5 outer samples, inner mean replaced by E[eta | xi])
// and evaluate F at its solution.
ReferenceOptimum reference_optimum(const CsoProblem& problem, const OracleSpec& oracle,
                                   const SolverConfig& solver);

struct RunOptions {
  int threads = 1;
  // Reuse or store F* in this JSON file.
  std::optional<std::filesystem::path> fstar_cache;
};

ExperimentReport run_experiment(const ExperimentConfig& cfg, const RunOptions& options = {});

// Summary rows for cells already in canonical order. Failed cells are
// excluded from the statistics and counted in `failures`.
std::vector<SummaryRow> summarize(const std::vector<CellRecord>& cells);

struct CsvPaths {
  std::filesystem::path raw;
  std::filesystem::path summary;
};

std::string raw_csv(const ExperimentReport& report);
std::string summary_csv(const ExperimentReport& report);
CsvPaths emit_csv(const ExperimentReport& report, const std::filesystem::path& out_dir);

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t replications = 0;
};

// Mean of F(x_m) - F* for the one-dimensional Huber problem, x_m from the
// closed-form solver on m fresh inner samples per replication.
MonteCarloEstimate huber1d_monte_carlo(double gamma, double sigma2, std::int64_t m,
                                       std::int64_t replications, std::uint64_t seed,
                                       int threads = 1);

}  // namespace cso
