#pragma once

namespace cso {

// H(u, gamma): u^2 / (2 gamma) for |u| <= gamma, |u| - gamma / 2 otherwise.
// gamma == 0 gives |u|. Negative gamma throws ConfigError.
double huber(double u, double gamma);

// Derivative of huber in u. For gamma == 0 this is sign(u) with 0 at u == 0.
double huber_grad(double u, double gamma);

// argmin_w  t * H(w, gamma) + (w - v)^2 / 2, t > 0.
double huber_prox(double v, double gamma, double t);

// sign with sign(0) == 0.
inline double sign0(double u) { return u > 0.0 ? 1.0 : (u < 0.0 ? -1.0 : 0.0); }

}  // namespace cso
