#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "cso/problem.hpp"
#include "cso/saa.hpp"

namespace cso {

enum class Regime { CondLipschitz, CondSmooth, CondHEB, CondHEBSmooth, IndepLipschitz, IndepHEB };

const char* to_string(Regime r);
Regime parse_regime(const std::string& s);

// All bounds below hold up to absolute constants; the ones the derivations
// leave unnamed are collected in absolute_constant.
struct BoundInputs {
  double lipschitz_outer = 0.0;      // L_f
  double lipschitz_inner = 0.0;      // L_g
  std::optional<double> smoothness;  // S
  double bound_outer = 0.0;          // M_f
  double bound_inner = 0.0;          // M_g
  double variance_outer = 0.0;       // sigma_f^2
  double variance_inner = 0.0;       // sigma_g^2
  double diameter = 0.0;             // D_X
  int dimension = 1;                 // d
  int inner_dimension = 1;           // k
  std::optional<double> mu;          // error bound modulus
  double delta = 1.0;                // error bound exponent
  double epsilon = 0.1;
  double alpha = 0.1;
  Regime regime = Regime::CondLipschitz;
  double absolute_constant = 1.0;
};

// Declared constants of a problem, D_X = 2R.
BoundInputs bound_inputs(const CsoProblem& problem, Regime regime, double epsilon, double alpha);

struct SampleComplexity {
  std::int64_t n_min = 0;
  std::int64_t m_min = 0;
  std::int64_t total = 0;  // n m + n (conditional) or n + m (independent)
};

SampleComplexity sample_complexity(const BoundInputs& in);

struct BiasVarianceBounds {
  double bias_bound = 0.0;
  double var_bound = 0.0;
  double mse_bound = 0.0;
};

// bias = L_f sigma_g / sqrt(m), or S sigma_g^2 / (2 m) when smooth;
// var = sigma_f^2 / n + 4 M_f L_f sigma_g / (n sqrt(m)).
BiasVarianceBounds bias_variance_bounds(const BoundInputs& in, std::int64_t n, std::int64_t m,
                                        bool smooth);

struct SubGaussianTail {};
struct RateFunctionTail {
  double slack = 0.0;
};
// Union over k coordinates.
struct VectorTail {
  int k = 1;
  double slack = 0.0;
};
using TailVariant = std::variant<SubGaussianTail, RateFunctionTail, VectorTail>;

// P(|mean - E| >= eps) bound for n i.i.d. samples with variance proxy sigma2,
// capped at 1. The rate-function forms are asymptotic (small eps) only.
double large_deviation_bound(std::int64_t n, double epsilon, double sigma2,
                             const TailVariant& variant);

struct Huber1DError {
  double main = 0.0;
  double remainder_bound = 0.0;
  // E F(x_m) - F* computed without bounding (Gaussian integral in closed form).
  double exact = 0.0;
};

// E F(x_m) - F* for the one-dimensional Huber problem with x_m = -mean(eta).
// The exact value lies in [main, main + remainder_bound]. At gamma = 0,
// main is the limit of the gamma > 0 expression and the remainder is the
// limit of its bound, sqrt(sigma2 / (2 pi m)).
Huber1DError huber1d_expected_error(double gamma, double sigma2, std::int64_t m);

struct QgProbeResult {
  double mu_hat = 0.0;
  std::int64_t probes_used = 0;
};

// min over random domain points x with |x - x_hat| >= 1e-3 of
// (F_nm(x) - F_nm(x_hat)) / |x - x_hat|^2.
QgProbeResult qg_probe(const SaaObjective& obj, ConstVectorRef x_hat, std::int64_t probes,
                       std::uint64_t seed);

}  // namespace cso
