#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "cso/rng.hpp"
#include "cso/types.hpp"

namespace cso {

// (mu, delta) pair of the Hölderian error bound
//   F(x) - F* >= mu * dist(x, X*)^(1 + delta).
struct ErrorBoundParams {
  double mu = 0.0;
  double delta = 1.0;
};

// Declared problem constants. Variances are stored squared (sigma_f^2,
// sigma_g^2); analysis takes square roots where the bounds need sigma.
struct ProblemConstants {
  double lipschitz_outer = 0.0;        // L_f
  double lipschitz_inner = 0.0;        // L_g
  std::optional<double> smoothness;    // S, present iff the outer function is smooth
  double bound_outer = 0.0;            // M_f
  double bound_inner = 0.0;            // M_g
  double variance_outer = 0.0;         // sigma_f^2
  double variance_inner = 0.0;         // sigma_g^2
  std::optional<ErrorBoundParams> error_bound;
};

// min_{x in X} E_xi[ f_xi( E_{eta|xi}[ g_eta(x, xi) ] ) ],  X = {x : |x|_2 <= R}.
//
// Outer samples xi and inner samples eta are encoded as real vectors of fixed
// length (xi_dimension(), eta_dimension()); either may be empty. Every method
// is const and the object is immutable after construction; randomness comes
// in through an explicit Rng.
class CsoProblem {
 public:
  virtual ~CsoProblem() = default;

  virtual std::string name() const = 0;

  int dimension() const { return dimension_; }
  int inner_dimension() const { return inner_dimension_; }
  int xi_dimension() const { return xi_dimension_; }
  int eta_dimension() const { return eta_dimension_; }
  double domain_radius() const { return domain_radius_; }
  const ProblemConstants& constants() const { return constants_; }

  // Whether f_xi is Lipschitz smooth.
  virtual bool smooth_outer() const = 0;
  // Whether eta is independent of xi (enables the independent scheme).
  virtual bool independent_inner() const = 0;

  // f_xi(u), u in R^k.
  virtual double outer_value(ConstVectorRef u, ConstVectorRef xi) const = 0;
  // Gradient or, for nonsmooth f, a fixed subgradient element of f_xi at u.
  virtual void outer_gradient(ConstVectorRef u, ConstVectorRef xi, VectorRef out) const = 0;

  // g_eta(x, xi) in R^k.
  virtual void inner_value(ConstVectorRef x, ConstVectorRef xi, ConstVectorRef eta,
                           VectorRef out) const = 0;
  // k x d Jacobian of g_eta(., xi) at x.
  virtual void inner_jacobian(ConstVectorRef x, ConstVectorRef xi, ConstVectorRef eta,
                              MatrixRef out) const = 0;

  virtual void sample_outer(Rng& rng, VectorRef xi) const = 0;
  // One draw from P(eta | xi). For independent instances xi is ignored.
  virtual void sample_inner(ConstVectorRef xi, Rng& rng, VectorRef eta) const = 0;

  // E[eta | xi]. Together with inner_linear_in_eta() this collapses the inner
  // expectation exactly.
  virtual void conditional_eta_mean(ConstVectorRef xi, VectorRef out) const;

  // g_eta(x, xi) = A(xi, eta) x + c(xi, eta).
  virtual bool affine_inner() const { return false; }
  // A and c are affine in eta, so averaging them over samples equals
  // evaluating them at the sample mean of eta.
  virtual bool inner_linear_in_eta() const { return false; }
  // A (k x d) and c (k) at one (xi, eta). The default reads them off the
  // Jacobian and the value at x = 0; it is only valid when affine_inner().
  virtual void inner_affine(ConstVectorRef xi, ConstVectorRef eta, MatrixRef a_out,
                            VectorRef c_out) const;

  // Proximal map of the outer function: argmin_w t f_xi(w) + |w - v|^2 / 2.
  virtual bool has_outer_prox() const { return false; }
  virtual void outer_prox(ConstVectorRef v, ConstVectorRef xi, double t, VectorRef out) const;

  // E_{eta|xi} g_eta(x, xi). The default is valid for instances linear in eta.
  virtual void conditional_inner_mean(ConstVectorRef x, ConstVectorRef xi, VectorRef out) const;

  // F(x) in closed form (or by deterministic quadrature), when available.
  virtual std::optional<double> closed_form_objective(ConstVectorRef x) const;
  // F* known analytically (no numerical integration).
  virtual std::optional<double> analytic_optimal_value() const { return std::nullopt; }
  // F* by closed form or quadrature. Defaults to the analytic value.
  virtual std::optional<double> closed_form_optimal_value() const {
    return analytic_optimal_value();
  }

 protected:
  CsoProblem(int dimension, int inner_dimension, int xi_dimension, int eta_dimension,
             double domain_radius);

  void set_constants(const ProblemConstants& c) { constants_ = c; }

 private:
  int dimension_;
  int inner_dimension_;
  int xi_dimension_;
  int eta_dimension_;
  double domain_radius_;
  ProblemConstants constants_;
};

// How F(x) is evaluated.
struct ClosedFormOracle {};
struct MonteCarloOracle {
  std::int64_t samples = 1'000'000;
  std::uint64_t seed = 20240601;
};
using OracleSpec = std::variant<ClosedFormOracle, MonteCarloOracle>;

struct ObjectiveEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

// F(x). MonteCarlo draws fresh outer samples and evaluates the inner
// expectation exactly through conditional_inner_mean.
ObjectiveEstimate true_objective(const CsoProblem& problem, ConstVectorRef x,
                                 const OracleSpec& oracle);

bool in_domain(const CsoProblem& problem, ConstVectorRef x, double slack = 1e-9);

}  // namespace cso
