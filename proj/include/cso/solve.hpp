#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cso/saa.hpp"

namespace cso {

Vector project_ball(ConstVectorRef x, double radius);

enum class SolverMethod {
  Auto,                  // gradient for smooth f, primal-dual when f has a prox, else subgradient
  ProjectedGradient,     // Barzilai-Borwein step with Armijo backtracking
  ProjectedSubgradient,  // step c / sqrt(t)
  PrimalDual,            // Chambolle-Pock on the reduced composite form
  ClosedForm,            // minimizer of the one-dimensional Huber problem
};

const char* to_string(SolverMethod m);
SolverMethod parse_solver_method(const std::string& s);

enum class Termination { Converged, MaxIters, Stalled };
const char* to_string(Termination t);

struct SolverConfig {
  SolverMethod method = SolverMethod::Auto;
  std::int64_t max_iters = 20000;
  // Gradient-mapping norm (gradient), best-value improvement over the stall
  // window (subgradient), fixed-point residual (primal-dual).
  double tolerance = 1e-8;
  std::optional<Vector> initial_point;  // default 0
  double armijo_shrink = 0.5;
  double armijo_slope = 1e-4;
  std::optional<double> step_constant;  // default 2R / sqrt(max_iters)
  std::int64_t stall_window = 200;
  bool record_trace = false;
};

void validate(const SolverConfig& cfg);

struct SolveResult {
  Vector x_hat;
  double value = 0.0;
  std::int64_t iterations = 0;
  Termination reason = Termination::MaxIters;
  SolverMethod method = SolverMethod::Auto;
  std::vector<double> trace;  // best value so far, one entry per iteration
};

// Throws RuntimeFailure (with the iteration index) on a non-finite objective.
SolveResult solve_saa(const SaaObjective& obj, const SolverConfig& cfg = {});

// -mean(eta) for a Huber1D dataset: independent, or conditional with n = 1.
double huber1d_closed_form(const CsoProblem& problem, const Dataset& dataset);

}  // namespace cso
