#include "cso/analysis.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace cso {

const char* to_string(Regime r) {
  switch (r) {
    case Regime::CondLipschitz: return "CondLipschitz";
    case Regime::CondSmooth: return "CondSmooth";
    case Regime::CondHEB: return "CondHEB";
    case Regime::CondHEBSmooth: return "CondHEBSmooth";
    case Regime::IndepLipschitz: return "IndepLipschitz";
    case Regime::IndepHEB: return "IndepHEB";
  }
  return "?";
}

Regime parse_regime(const std::string& s) {
  for (Regime r : {Regime::CondLipschitz, Regime::CondSmooth, Regime::CondHEB,
                   Regime::CondHEBSmooth, Regime::IndepLipschitz, Regime::IndepHEB})
    if (s == to_string(r)) return r;
  throw ConfigError("unknown regime: " + s);
}

BoundInputs bound_inputs(const CsoProblem& problem, Regime regime, double epsilon, double alpha) {
  const ProblemConstants& c = problem.constants();
  BoundInputs in;
  in.lipschitz_outer = c.lipschitz_outer;
  in.lipschitz_inner = c.lipschitz_inner;
  in.smoothness = c.smoothness;
  in.bound_outer = c.bound_outer;
  in.bound_inner = c.bound_inner;
  in.variance_outer = c.variance_outer;
  in.variance_inner = c.variance_inner;
  in.diameter = 2.0 * problem.domain_radius();
  in.dimension = problem.dimension();
  in.inner_dimension = problem.inner_dimension();
  if (c.error_bound) {
    in.mu = c.error_bound->mu;
    in.delta = c.error_bound->delta;
  }
  in.epsilon = epsilon;
  in.alpha = alpha;
  in.regime = regime;
  return in;
}

namespace {

// Ceiling that ignores floating-point noise just above an integer.
std::int64_t ceil_count(double x) {
  if (!std::isfinite(x)) throw ConfigError("sample_complexity: bound is not finite");
  const double c = std::ceil(x * (1.0 - 1e-12));
  if (c > 4.0e18) throw ConfigError("sample_complexity: bound exceeds the integer range");
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(c));
}

void check_common(const BoundInputs& in) {
  if (!(in.epsilon > 0.0)) throw ConfigError("bounds: epsilon must be > 0");
  if (!(in.alpha > 0.0 && in.alpha < 1.0)) throw ConfigError("bounds: alpha must lie in (0, 1)");
  if (!(in.absolute_constant > 0.0)) throw ConfigError("bounds: absolute constant must be > 0");
  if (in.lipschitz_outer < 0.0 || in.lipschitz_inner < 0.0 || in.bound_outer < 0.0 ||
      in.bound_inner < 0.0 || in.variance_outer < 0.0 || in.variance_inner < 0.0)
    throw ConfigError("bounds: constants must be nonnegative");
}

double require_smoothness(const BoundInputs& in) {
  if (!in.smoothness) throw ConfigError(std::string("bounds: regime ") + to_string(in.regime) +
                                        " needs the smoothness constant S");
  return *in.smoothness;
}

double require_mu(const BoundInputs& in) {
  if (!in.mu || !(*in.mu > 0.0))
    throw ConfigError(std::string("bounds: regime ") + to_string(in.regime) + " needs mu > 0");
  if (!(in.delta >= 0.0)) throw ConfigError("bounds: delta must be >= 0");
  return *in.mu;
}

// d log(8 L_f L_g D / eps) + log(1 / alpha).
double net_log_factor(const BoundInputs& in) {
  if (!(in.diameter > 0.0)) throw ConfigError("bounds: diameter must be > 0");
  const double arg = 8.0 * in.lipschitz_outer * in.lipschitz_inner * in.diameter / in.epsilon;
  return in.dimension * std::log(arg) + std::log(1.0 / in.alpha);
}

double heb_outer_count(const BoundInputs& in) {
  const double mu = require_mu(in);
  return std::pow(2.0 * in.lipschitz_outer * in.lipschitz_inner, in.delta + 1.0) /
         (mu * std::pow(in.alpha * in.epsilon, in.delta));
}

}  // namespace

SampleComplexity sample_complexity(const BoundInputs& in) {
  check_common(in);
  const double eps = in.epsilon, a = in.alpha, c = in.absolute_constant;
  const double lf = in.lipschitz_outer, lg = in.lipschitz_inner;
  const double sg = std::sqrt(in.variance_inner), sg2 = in.variance_inner;
  const double sf2 = in.variance_outer;
  double n = 0.0, m = 0.0;
  bool conditional = true;
  switch (in.regime) {
    case Regime::CondLipschitz:
    case Regime::CondSmooth: {
      n = c * (sf2 + 4.0 * in.bound_outer * lf * sg) / (eps * eps) * net_log_factor(in);
      if (in.regime == Regime::CondLipschitz)
        m = lf * lf * sg2 / (eps * eps);
      else
        m = 2.0 * require_smoothness(in) * sg2 / eps;
      break;
    }
    case Regime::CondHEB:
      n = heb_outer_count(in);
      m = 16.0 * lf * lf * sg2 / (a * a * eps * eps);
      break;
    case Regime::CondHEBSmooth:
      n = heb_outer_count(in);
      m = 2.0 * require_smoothness(in) * sg2 / (a * eps);
      break;
    case Regime::IndepLipschitz: {
      conditional = false;
      const double logs = net_log_factor(in);
      n = c * sf2 / (eps * eps) * logs;
      const double n_int = static_cast<double>(ceil_count(n));
      m = c * lf * lf * sg2 / (eps * eps) * (logs + std::log(n_int * in.inner_dimension));
      break;
    }
    case Regime::IndepHEB: {
      conditional = false;
      n = heb_outer_count(in);
      if (!(in.diameter > 0.0)) throw ConfigError("bounds: diameter must be > 0");
      const double t1 = 12.0 * lf * sg / (a * eps);
      const double t2 = 6.0 * lf * in.bound_inner / (a * eps);
      const double lg_arg = 12.0 * in.diameter * lf * lg / (a * eps);
      m = std::max(t1 * t1, c * t2 * t2 * in.dimension * std::log(lg_arg));
      break;
    }
  }
  SampleComplexity out;
  out.n_min = ceil_count(n);
  out.m_min = ceil_count(m);
  out.total = conditional ? out.n_min * out.m_min + out.n_min : out.n_min + out.m_min;
  return out;
}

BiasVarianceBounds bias_variance_bounds(const BoundInputs& in, std::int64_t n, std::int64_t m,
                                        bool smooth) {
  if (n < 1 || m < 1) throw ConfigError("bias_variance_bounds: n and m must be >= 1");
  const double sg = std::sqrt(in.variance_inner);
  const auto nd = static_cast<double>(n), md = static_cast<double>(m);
  BiasVarianceBounds b;
  if (smooth)
    b.bias_bound = require_smoothness(in) * in.variance_inner / (2.0 * md);
  else
    b.bias_bound = in.lipschitz_outer * sg / std::sqrt(md);
  b.var_bound = in.variance_outer / nd + 4.0 * in.bound_outer * in.lipschitz_outer * sg /
                                             (nd * std::sqrt(md));
  b.mse_bound = b.bias_bound * b.bias_bound + b.var_bound;
  return b;
}

double large_deviation_bound(std::int64_t n, double epsilon, double sigma2,
                             const TailVariant& variant) {
  if (n < 1) throw ConfigError("large_deviation_bound: n must be >= 1");
  if (!(sigma2 > 0.0)) throw ConfigError("large_deviation_bound: sigma2 must be > 0");
  if (!(epsilon >= 0.0)) throw ConfigError("large_deviation_bound: epsilon must be >= 0");
  const double q = static_cast<double>(n) * epsilon * epsilon / sigma2;
  double p = 1.0;
  if (std::holds_alternative<SubGaussianTail>(variant)) {
    p = std::exp(-q / 2.0);
  } else if (const auto* r = std::get_if<RateFunctionTail>(&variant)) {
    if (!(r->slack >= 0.0)) throw ConfigError("large_deviation_bound: slack must be >= 0");
    p = std::exp(-q / (2.0 + r->slack));
  } else {
    const auto& v = std::get<VectorTail>(variant);
    if (v.k < 1) throw ConfigError("large_deviation_bound: k must be >= 1");
    if (!(v.slack >= 0.0)) throw ConfigError("large_deviation_bound: slack must be >= 0");
    p = 2.0 * v.k * std::exp(-q / (2.0 + v.slack));
  }
  return std::min(1.0, p);
}

Huber1DError huber1d_expected_error(double gamma, double sigma2, std::int64_t m) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ConfigError("huber1d: gamma must be >= 0");
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw ConfigError("huber1d: sigma2 must be > 0");
  if (m < 1) throw ConfigError("huber1d: m must be >= 1");
  const auto md = static_cast<double>(m);
  const double s2 = sigma2 / md;  // variance of the inner mean
  const double s = std::sqrt(s2);
  const double tail = std::sqrt(s2 / (2.0 * std::numbers::pi));
  Huber1DError e;
  if (gamma == 0.0) {
    e.main = tail + s2;
    e.remainder_bound = tail;
    e.exact = s * std::sqrt(2.0 / std::numbers::pi) + s2;
    return e;
  }
  const double z = gamma / (std::numbers::sqrt2 * s);
  e.main = s2 / (2.0 * gamma) * std::erf(z) + s2;
  e.remainder_bound = tail * std::exp(-z * z);
  // E H(Y, gamma) for Y ~ N(0, s2), plus E Y^2.
  const double a = gamma / s;
  const double pdf = std::exp(-0.5 * a * a) / std::sqrt(2.0 * std::numbers::pi);
  e.exact = s2 / (2.0 * gamma) * std::erf(z) + s * pdf - 0.5 * gamma * std::erfc(z) + s2;
  return e;
}

QgProbeResult qg_probe(const SaaObjective& obj, ConstVectorRef x_hat, std::int64_t probes,
                       std::uint64_t seed) {
  if (probes < 1) throw ConfigError("qg_probe: probes must be >= 1");
  const CsoProblem& p = obj.problem();
  if (x_hat.size() != p.dimension()) throw ConfigError("qg_probe: dimension mismatch");
  const double R = p.domain_radius();
  const double f_hat = obj.value(x_hat);
  Rng rng(seed);
  Vector dir(p.dimension()), x(p.dimension());
  QgProbeResult out;
  out.mu_hat = std::numeric_limits<double>::infinity();
  // Distances log-uniform in [1e-3, 2R] so both local and global growth are probed.
  const double lo = std::log(1e-3), hi = std::log(2.0 * R);
  for (std::int64_t t = 0; t < probes; ++t) {
    for (Eigen::Index j = 0; j < dir.size(); ++j) dir[j] = rng.gaussian();
    const double nd = dir.norm();
    if (nd == 0.0) continue;
    const double r = std::exp(lo + (hi - lo) * rng.uniform());
    x = x_hat + (r / nd) * dir;
    const double nx = x.norm();
    if (nx > R) x *= R / nx;
    const double dist2 = (x - x_hat).squaredNorm();
    if (dist2 < 1e-6) continue;
    out.mu_hat = std::min(out.mu_hat, (obj.value(x) - f_hat) / dist2);
    ++out.probes_used;
  }
  if (out.probes_used == 0) out.mu_hat = 0.0;
  return out;
}

}  // namespace cso
