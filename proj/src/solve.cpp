#include "cso/solve.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace cso {

Vector project_ball(ConstVectorRef x, double radius) {
  if (!(radius > 0.0)) throw ConfigError("project_ball: radius must be > 0");
  const double nx = x.norm();
  // A scaled point can land a few ulps outside; treating those as inside
  // keeps the projection idempotent.
  if (nx <= radius * (1.0 + 4.0 * std::numeric_limits<double>::epsilon())) return x;
  return x * (radius / nx);
}

const char* to_string(SolverMethod m) {
  switch (m) {
    case SolverMethod::Auto: return "Auto";
    case SolverMethod::ProjectedGradient: return "ProjectedGradient";
    case SolverMethod::ProjectedSubgradient: return "ProjectedSubgradient";
    case SolverMethod::PrimalDual: return "PrimalDual";
    case SolverMethod::ClosedForm: return "ClosedForm";
  }
  return "?";
}

SolverMethod parse_solver_method(const std::string& s) {
  for (SolverMethod m : {SolverMethod::Auto, SolverMethod::ProjectedGradient,
                         SolverMethod::ProjectedSubgradient, SolverMethod::PrimalDual,
                         SolverMethod::ClosedForm})
    if (s == to_string(m)) return m;
  throw ConfigError("unknown solver method: " + s);
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::Converged: return "Converged";
    case Termination::MaxIters: return "MaxIters";
    case Termination::Stalled: return "Stalled";
  }
  return "?";
}

void validate(const SolverConfig& cfg) {
  if (cfg.max_iters < 1) throw ConfigError("solver: max_iters must be >= 1");
  if (!(cfg.tolerance > 0.0)) throw ConfigError("solver: tolerance must be > 0");
  if (!(cfg.armijo_shrink > 0.0 && cfg.armijo_shrink < 1.0))
    throw ConfigError("solver: armijo shrink must lie in (0, 1)");
  if (!(cfg.armijo_slope > 0.0 && cfg.armijo_slope < 1.0))
    throw ConfigError("solver: armijo slope must lie in (0, 1)");
  if (cfg.step_constant && !(*cfg.step_constant > 0.0))
    throw ConfigError("solver: step constant must be > 0");
  if (cfg.stall_window < 1) throw ConfigError("solver: stall window must be >= 1");
}

namespace {

[[noreturn]] void non_finite(const char* method, std::int64_t iter) {
  throw RuntimeFailure(std::string(method) + ": non-finite objective at iteration " +
                       std::to_string(iter));
}

void check_feasible(const CsoProblem& p, const Vector& x, std::int64_t iter) {
  if (x.norm() > p.domain_radius() * (1.0 + 1e-12))
    throw RuntimeFailure("solver: iterate left the domain at iteration " + std::to_string(iter));
}

Vector start_point(const SaaObjective& obj, const SolverConfig& cfg) {
  const double R = obj.problem().domain_radius();
  if (!cfg.initial_point) return Vector::Zero(obj.dimension());
  if (cfg.initial_point->size() != obj.dimension())
    throw ConfigError("solver: initial point has the wrong dimension");
  return project_ball(*cfg.initial_point, R);
}

SolveResult projected_gradient(const SaaObjective& obj, const SolverConfig& cfg) {
  const double R = obj.problem().domain_radius();
  SolveResult res;
  res.method = SolverMethod::ProjectedGradient;
  Vector x = start_point(obj, cfg);
  Vector g(x.size()), g_new(x.size()), x_new(x.size());
  double f = obj.value_and_subgradient(x, g);
  if (!std::isfinite(f)) non_finite("ProjectedGradient", 0);
  double t = 1.0;
  res.reason = Termination::MaxIters;
  std::int64_t it = 0;
  for (; it < cfg.max_iters; ++it) {
    // Interior trial points give the mapping exactly as |g|; subtracting
    // would round it away once |g| drops below ulp(x).
    const Vector trial = x - g;
    const double residual = trial.norm() < R ? g.norm() : (x - project_ball(trial, R)).norm();
    if (residual <= cfg.tolerance) {
      res.reason = Termination::Converged;
      break;
    }
    bool accepted = false;
    double f_new = f;
    while (true) {
      x_new = project_ball(x - t * g, R);
      const Vector step = x_new - x;
      if (step.squaredNorm() == 0.0) break;
      f_new = obj.value_and_subgradient(x_new, g_new);
      if (!std::isfinite(f_new)) non_finite("ProjectedGradient", it + 1);
      if (f_new < f && f_new <= f + cfg.armijo_slope * g.dot(step)) {
        accepted = true;
        break;
      }
      t *= cfg.armijo_shrink;
      if (t < 1e-30) break;
    }
    if (!accepted) {
      res.reason = Termination::Stalled;
      break;
    }
    check_feasible(obj.problem(), x_new, it + 1);
    const Vector s = x_new - x;
    const Vector y = g_new - g;
    const double sy = s.dot(y);
    t = sy > 0.0 ? std::clamp(s.squaredNorm() / sy, 1e-20, 1e100) : std::min(2.0 * t, 1e100);
    x.swap(x_new);
    g.swap(g_new);
    f = f_new;
    if (cfg.record_trace) res.trace.push_back(f);
  }
  res.iterations = it;
  res.x_hat = x;
  res.value = f;
  return res;
}

SolveResult projected_subgradient(const SaaObjective& obj, const SolverConfig& cfg) {
  const double R = obj.problem().domain_radius();
  const double c = cfg.step_constant.value_or(2.0 * R / std::sqrt(static_cast<double>(cfg.max_iters)));
  SolveResult res;
  res.method = SolverMethod::ProjectedSubgradient;
  res.reason = Termination::MaxIters;
  Vector x = start_point(obj, cfg);
  Vector g(x.size());
  double f = obj.value_and_subgradient(x, g);
  if (!std::isfinite(f)) non_finite("ProjectedSubgradient", 0);
  Vector best_x = x;
  double best = f;
  double window_start_best = best;
  std::int64_t it = 0;
  for (; it < cfg.max_iters; ++it) {
    const double gn = g.norm();
    if (gn == 0.0) {
      res.reason = Termination::Converged;
      break;
    }
    x = project_ball(x - (c / std::sqrt(static_cast<double>(it + 1))) * (g / gn), R);
    check_feasible(obj.problem(), x, it + 1);
    f = obj.value_and_subgradient(x, g);
    if (!std::isfinite(f)) non_finite("ProjectedSubgradient", it + 1);
    if (f < best) {
      best = f;
      best_x = x;
    }
    if (cfg.record_trace) res.trace.push_back(best);
    if ((it + 1) % cfg.stall_window == 0) {
      if (window_start_best - best < cfg.tolerance) {
        ++it;
        res.reason = Termination::Converged;
        break;
      }
      window_start_best = best;
    }
  }
  res.iterations = it;
  res.x_hat = best_x;
  res.value = best;
  return res;
}

// min_x sum_i (1/n) phi_i(A_i x + c_i) + (mu/2)|x|^2 over the ball, written as
// min_x G(K x) + H(x) with K = A / sqrt(n) and G(z) = sum_i (1/n) phi_i(sqrt(n) z_i + c_i).
SolveResult primal_dual(const SaaObjective& obj, const SolverConfig& cfg) {
  const CsoProblem& p = obj.problem();
  if (!obj.reduced() || !p.has_outer_prox())
    throw ConfigError(p.name() + ": primal-dual needs the reduced form and an outer prox");
  const double R = p.domain_radius();
  const double mu = obj.regularizer();
  const int k = p.inner_dimension();
  const std::int64_t n = obj.outer_count();
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  const Matrix K = obj.stacked_matrix() / sqrt_n;
  const Vector& c = obj.stacked_offset();

  const Matrix gram = K.transpose() * K;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
  const double norm_k = std::sqrt(std::max(eig.eigenvalues().maxCoeff(), 1e-300));
  const double tau = 0.99 / norm_k, sigma = 0.99 / norm_k;

  SolveResult res;
  res.method = SolverMethod::PrimalDual;
  res.reason = Termination::MaxIters;
  Vector x = start_point(obj, cfg);
  Vector x_bar = x;
  Vector y = Vector::Zero(K.rows());
  Vector v(K.rows()), u(k);
  Vector best_x = x;
  double best = obj.value(x);
  if (!std::isfinite(best)) non_finite("PrimalDual", 0);
  constexpr std::int64_t kCheckEvery = 10;

  std::int64_t it = 0;
  for (; it < cfg.max_iters; ++it) {
    // Dual step: y <- prox_{sigma G*}(y + sigma K x_bar) via Moreau.
    v = y + sigma * (K * x_bar);
    const Vector y_old = y;
    for (std::int64_t i = 0; i < n; ++i) {
      const auto vi = v.segment(i * k, k);
      const Vector w = vi / sigma;
      p.outer_prox(sqrt_n * w + c.segment(i * k, k), obj.outer_sample(i), 1.0 / sigma, u);
      y.segment(i * k, k) = vi - sigma * (u - c.segment(i * k, k)) / sqrt_n;
    }
    // Primal step.
    const Vector x_new = project_ball((x - tau * (K.transpose() * y)) / (1.0 + tau * mu), R);
    check_feasible(p, x_new, it + 1);
    const double dx = (x_new - x).norm(), dy = (y - y_old).norm();
    x_bar = 2.0 * x_new - x;
    x = x_new;

    const bool converged = dx / tau + dy / sigma <= cfg.tolerance;
    if ((it + 1) % kCheckEvery == 0 || converged || it + 1 == cfg.max_iters) {
      const double f = obj.value(x);
      if (!std::isfinite(f)) non_finite("PrimalDual", it + 1);
      if (f < best) {
        best = f;
        best_x = x;
      }
    }
    if (cfg.record_trace) res.trace.push_back(best);
    if (converged) {
      ++it;
      res.reason = Termination::Converged;
      break;
    }
  }
  res.iterations = it;
  res.x_hat = best_x;
  res.value = best;
  return res;
}

SolveResult closed_form(const SaaObjective& obj) {
  SolveResult res;
  res.method = SolverMethod::ClosedForm;
  res.x_hat = project_ball(Vector::Constant(1, huber1d_closed_form(obj.problem(), obj.dataset())),
                           obj.problem().domain_radius());
  res.value = obj.value(res.x_hat);
  if (!std::isfinite(res.value)) non_finite("ClosedForm", 0);
  res.iterations = 0;
  res.reason = Termination::Converged;
  return res;
}

}  // namespace

SolveResult solve_saa(const SaaObjective& obj, const SolverConfig& cfg) {
  validate(cfg);
  SolverMethod method = cfg.method;
  const CsoProblem& p = obj.problem();
  if (method == SolverMethod::Auto) {
    if (p.smooth_outer())
      method = SolverMethod::ProjectedGradient;
    else if (obj.reduced() && p.has_outer_prox())
      method = SolverMethod::PrimalDual;
    else
      method = SolverMethod::ProjectedSubgradient;
  }
  switch (method) {
    case SolverMethod::ProjectedGradient: return projected_gradient(obj, cfg);
    case SolverMethod::ProjectedSubgradient: return projected_subgradient(obj, cfg);
    case SolverMethod::PrimalDual: return primal_dual(obj, cfg);
    case SolverMethod::ClosedForm:
      if (obj.regularizer() != 0.0)
        throw ConfigError("ClosedForm solver does not support a regularizer");
      return closed_form(obj);
    case SolverMethod::Auto: break;
  }
  throw ConfigError("solver: unresolved method");
}

double huber1d_closed_form(const CsoProblem& problem, const Dataset& dataset) {
  if (problem.name() != "Huber1D") throw ConfigError("huber1d_closed_form: needs a Huber1D instance");
  if (const auto* c = std::get_if<ConditionalDataset>(&dataset)) {
    if (c->n != 1)
      throw ConfigError("huber1d_closed_form: conditional datasets need n = 1");
    return -column_mean(c->inner)[0];
  }
  return -column_mean(std::get<IndependentDataset>(dataset).inner)[0];
}

}  // namespace cso
