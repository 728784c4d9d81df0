#pragma once

#include <memory>
#include <string>
#include <variant>

#include "cso/problem.hpp"

namespace cso {

inline constexpr double kDefaultDomainRadius = 100.0;

// xi = (a, b), a ~ N(0, sigma_xi2 I_d), b = sign(a' x_star) with sign(0) = +1,
// eta | xi ~ N(a, sigma_eta2 I_d), f_xi(u) = log(1 + exp(-b u)), g = eta' x.
struct RobustLogisticSpec {
  int d = 10;
  double sigma_xi2 = 1.0;
  double sigma_eta2 = 1.0;
  Vector x_star;
  double domain_radius = kDefaultDomainRadius;
};

// Same labels as RobustLogistic, but eta ~ N(0, sigma_eta2 I_d) independent of
// xi and g = (eta + a)' x.
struct IndependentLogisticSpec {
  int d = 10;
  double sigma_xi2 = 1.0;
  double sigma_eta2 = 1.0;
  Vector x_star;
  double domain_radius = kDefaultDomainRadius;
};

struct NoSmoothing {};
struct HuberSmoothing {
  double gamma = 0.1;
};
using Smoothing = std::variant<NoSmoothing, HuberSmoothing>;

// xi = (a, b), b = a' x_star, eta | xi ~ N(a, sigma_eta2 I_d),
// f_xi(u) = |u - b| (or H(u - b, gamma)), g = eta' x.
struct LavRegressionSpec {
  int d = 20;
  double sigma_xi2 = 1.0;
  double sigma_eta2 = 1.0;
  Vector x_star;
  Smoothing smoothing = NoSmoothing{};
  double domain_radius = kDefaultDomainRadius;
};

// No outer randomness. f(u) = H(u, gamma) + u^2, g = x + eta,
// eta ~ N(0, sigma_eta2). x* = 0, F* = 0.
struct Huber1DSpec {
  double gamma = 0.1;
  double sigma_eta2 = 1.0;
  double domain_radius = kDefaultDomainRadius;
};

// xi ~ U(0, 1), eta | xi ~ U(c + xi, c + xi + 1) with c = inner_offset,
// f(u) = u^2 + 3 sin^2(u), g = eta x. Every empirical objective satisfies
// quadratic growth with parameter mu around its unique minimizer 0.
struct SineQGSpec {
  double mu = 1.0;
  double inner_offset = 1.0;
  double domain_radius = kDefaultDomainRadius;
};

using InstanceSpec = std::variant<RobustLogisticSpec, IndependentLogisticSpec,
                                  LavRegressionSpec, Huber1DSpec, SineQGSpec>;

std::shared_ptr<const CsoProblem> build(const InstanceSpec& spec);

// Short tag used in reports ("RobustLogistic", "LavRegression", "LavHuber", ...).
std::string instance_tag(const InstanceSpec& spec);

// Common tail quantile used for the declared bounds on Gaussian quantities:
// |z|_2 <= sqrt(d) + kGaussianTail for z ~ N(0, I_d) fails with probability
// below exp(-kGaussianTail^2 / 2).
inline constexpr double kGaussianTail = 6.0;

namespace detail {

// log(1 + exp(z)) without overflow.
double softplus(double z);
// 1 / (1 + exp(-z)).
double sigmoid(double z);

// E_a log(1 + exp(-sign(a' v) a' x)) for a ~ N(0, sigma^2 I), where
// rho = cos(angle(x, v)) and norm_x = |x|. Computed by adaptive quadrature.
double logistic_population_loss(double norm_x, double rho, double sigma);

// E H(Y, gamma) for Y ~ N(0, s^2); gamma == 0 gives E|Y|.
double gaussian_huber_expectation(double s, double gamma);

}  // namespace detail

}  // namespace cso
