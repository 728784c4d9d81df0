#include "cso/problem.hpp"

#include <cmath>

namespace cso {

CsoProblem::CsoProblem(int dimension, int inner_dimension, int xi_dimension, int eta_dimension,
                       double domain_radius)
    : dimension_(dimension),
      inner_dimension_(inner_dimension),
      xi_dimension_(xi_dimension),
      eta_dimension_(eta_dimension),
      domain_radius_(domain_radius) {
  if (dimension < 1) throw ConfigError("problem: dimension must be >= 1");
  if (inner_dimension < 1) throw ConfigError("problem: inner dimension must be >= 1");
  if (xi_dimension < 0 || eta_dimension < 0) throw ConfigError("problem: negative sample size");
  if (!(domain_radius > 0.0) || !std::isfinite(domain_radius))
    throw ConfigError("problem: domain radius must be positive");
}

void CsoProblem::conditional_eta_mean(ConstVectorRef, VectorRef) const {
  throw ConfigError(name() + ": conditional mean of eta is not available");
}

void CsoProblem::inner_affine(ConstVectorRef xi, ConstVectorRef eta, MatrixRef a_out,
                              VectorRef c_out) const {
  if (!affine_inner()) throw ConfigError(name() + ": inner function is not affine in x");
  const Vector zero = Vector::Zero(dimension());
  inner_jacobian(zero, xi, eta, a_out);
  inner_value(zero, xi, eta, c_out);
}

void CsoProblem::outer_prox(ConstVectorRef, ConstVectorRef, double, VectorRef) const {
  throw ConfigError(name() + ": outer proximal map is not available");
}

void CsoProblem::conditional_inner_mean(ConstVectorRef x, ConstVectorRef xi,
                                        VectorRef out) const {
  if (!inner_linear_in_eta())
    throw ConfigError(name() + ": inner expectation has no closed form");
  Vector eta_mean(eta_dimension());
  conditional_eta_mean(xi, eta_mean);
  inner_value(x, xi, eta_mean, out);
}

std::optional<double> CsoProblem::closed_form_objective(ConstVectorRef) const {
  return std::nullopt;
}

bool in_domain(const CsoProblem& problem, ConstVectorRef x, double slack) {
  return x.size() == problem.dimension() &&
         x.norm() <= problem.domain_radius() * (1.0 + slack);
}

ObjectiveEstimate true_objective(const CsoProblem& problem, ConstVectorRef x,
                                 const OracleSpec& oracle) {
  if (x.size() != problem.dimension()) throw ConfigError("true_objective: dimension mismatch");
  if (std::holds_alternative<ClosedFormOracle>(oracle)) {
    auto v = problem.closed_form_objective(x);
    if (!v) throw ConfigError(problem.name() + ": no closed-form objective");
    return {*v, 0.0};
  }
  const auto& mc = std::get<MonteCarloOracle>(oracle);
  if (mc.samples < 2) throw ConfigError("true_objective: Monte Carlo needs >= 2 samples");
  Rng rng(mc.seed);
  Vector xi(problem.xi_dimension());
  Vector u(problem.inner_dimension());
  // Welford accumulation.
  double mean = 0.0, m2 = 0.0;
  for (std::int64_t i = 0; i < mc.samples; ++i) {
    problem.sample_outer(rng, xi);
    problem.conditional_inner_mean(x, xi, u);
    const double f = problem.outer_value(u, xi);
    const double delta = f - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (f - mean);
  }
  const auto n = static_cast<double>(mc.samples);
  return {mean, std::sqrt(m2 / (n - 1.0) / n)};
}

}  // namespace cso
