#include "cso/huber.hpp"

#include <cmath>

#include "cso/types.hpp"

namespace cso {

namespace {
void check_gamma(double gamma) {
  if (!(gamma >= 0.0)) throw ConfigError("huber: gamma must be >= 0");
}
}  // namespace

double huber(double u, double gamma) {
  check_gamma(gamma);
  const double a = std::abs(u);
  if (a <= gamma) return gamma > 0.0 ? u * u / (2.0 * gamma) : 0.0;
  return a - 0.5 * gamma;
}

double huber_grad(double u, double gamma) {
  check_gamma(gamma);
  if (std::abs(u) <= gamma) return gamma > 0.0 ? u / gamma : 0.0;
  return sign0(u);
}

double huber_prox(double v, double gamma, double t) {
  check_gamma(gamma);
  // Quadratic zone: w (1 + t / gamma) = v, valid while |w| <= gamma.
  if (std::abs(v) <= gamma + t) return gamma > 0.0 ? v * gamma / (gamma + t) : 0.0;
  return v - t * sign0(v);
}

}  // namespace cso
