#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "cso/problem.hpp"
#include "cso/sampling.hpp"

namespace cso {

// F_nm(x) = (1/n) sum_i f_{xi_i}( (1/m) sum_j g_{eta_ij}(x, xi_i) ) + (mu/2) |x|^2,
// where the inner index set is row i (conditional) or the shared list
// (independent).
class SaaObjective {
 public:
  // Generic evaluates every inner sample at every x. Reduced applies to inner
  // functions affine in x and linear in eta: the inner block mean collapses to
  // A_i x + c_i with A_i, c_i computed once from the block mean of eta.
  enum class Route { Auto, Generic, Reduced };

  SaaObjective(std::shared_ptr<const CsoProblem> problem, std::shared_ptr<const Dataset> dataset,
               double regularizer = 0.0, Route route = Route::Auto);

  const CsoProblem& problem() const { return *problem_; }
  const Dataset& dataset() const { return *dataset_; }
  double regularizer() const { return mu_; }
  int dimension() const { return problem_->dimension(); }
  std::int64_t outer_count() const { return n_; }
  bool reduced() const { return reduced_; }

  double value(ConstVectorRef x) const;
  Vector subgradient(ConstVectorRef x) const;
  double value_and_subgradient(ConstVectorRef x, VectorRef grad) const;

  // Reduced form only: rows [i k, (i + 1) k) of the stacked matrix and offset
  // hold A_i and c_i.
  const Matrix& stacked_matrix() const;
  const Vector& stacked_offset() const;
  ConstVectorRef outer_sample(std::int64_t i) const;

 private:
  double evaluate(ConstVectorRef x, VectorRef* grad) const;
  double evaluate_reduced(ConstVectorRef x, VectorRef* grad) const;
  double evaluate_generic(ConstVectorRef x, VectorRef* grad) const;

  std::shared_ptr<const CsoProblem> problem_;
  std::shared_ptr<const Dataset> dataset_;
  double mu_;
  std::int64_t n_;
  bool reduced_ = false;
  Matrix a_;
  Vector c_;
};

// Mean of the columns of a block, compensated.
Vector column_mean(const Eigen::Ref<const Matrix>& block);

struct MseProbeReport {
  Vector x;
  std::int64_t replications = 0;
  double bias_hat = 0.0;
  double var_hat = 0.0;
  double mse_hat = 0.0;
  double bias_se = 0.0;
  double var_se = 0.0;
  double mse_se = 0.0;
  double bias_bound = 0.0;
  double var_bound = 0.0;
  // Not part of the serialized record order but reported in JSON.
  double objective = 0.0;
  double objective_se = 0.0;
  std::int64_t n = 0;
  std::int64_t m = 0;
  Scheme scheme = Scheme::Conditional;
};

std::string to_json(const MseProbeReport& r);
std::string mse_probe_csv_header();
// x is written as one field with components joined by ';'.
std::string to_csv_row(const MseProbeReport& r);

// Draws R datasets, evaluates F_nm at the fixed x on each, and compares with
// F(x) from the oracle (evaluated once; its error is folded into the SEs).
MseProbeReport mse_probe(std::shared_ptr<const CsoProblem> problem, ConstVectorRef x,
                         std::int64_t n, std::int64_t m, Scheme scheme, std::int64_t replications,
                         std::uint64_t seed, const OracleSpec& oracle = ClosedFormOracle{},
                         int threads = 1);

}  // namespace cso
