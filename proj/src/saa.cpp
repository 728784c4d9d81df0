#include "cso/saa.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "json.hpp"

#include "cso/analysis.hpp"
#include "cso/format.hpp"
#include "cso/parallel.hpp"
#include "cso/summation.hpp"

namespace cso {

Vector column_mean(const Eigen::Ref<const Matrix>& block) {
  const Eigen::Index rows = block.rows(), cols = block.cols();
  Vector out(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    CompensatedSum s;
    for (Eigen::Index c = 0; c < cols; ++c) s.add(block(r, c));
    out[r] = s.value() / static_cast<double>(cols);
  }
  return out;
}

namespace {

struct DatasetView {
  const Matrix* outer;
  const Matrix* inner;
  std::int64_t n, m;
  bool shared;

  auto block(std::int64_t i) const {
    return shared ? inner->middleCols(0, m) : inner->middleCols(i * m, m);
  }
};

DatasetView view(const Dataset& ds) {
  if (const auto* c = std::get_if<ConditionalDataset>(&ds))
    return {&c->outer, &c->inner, c->n, c->m, false};
  const auto& d = std::get<IndependentDataset>(ds);
  return {&d.outer, &d.inner, d.n, d.m, true};
}

}  // namespace

SaaObjective::SaaObjective(std::shared_ptr<const CsoProblem> problem,
                           std::shared_ptr<const Dataset> dataset, double regularizer, Route route)
    : problem_(std::move(problem)), dataset_(std::move(dataset)), mu_(regularizer) {
  if (!problem_ || !dataset_) throw ConfigError("SaaObjective: null problem or dataset");
  if (!(mu_ >= 0.0) || !std::isfinite(mu_)) throw ConfigError("SaaObjective: regularizer must be >= 0");
  const DatasetView v = view(*dataset_);
  n_ = v.n;
  if (v.n < 1 || v.m < 1) throw ConfigError("SaaObjective: empty dataset");
  if (v.outer->rows() != problem_->xi_dimension() || v.inner->rows() != problem_->eta_dimension())
    throw ConfigError("SaaObjective: dataset does not match the problem");
  if (v.shared && !problem_->independent_inner())
    throw ConfigError(problem_->name() + ": independent dataset for a conditional instance");

  const bool reducible = problem_->affine_inner() && problem_->inner_linear_in_eta();
  if (route == Route::Reduced && !reducible)
    throw ConfigError(problem_->name() + ": reduced evaluation needs an affine, eta-linear inner map");
  reduced_ = route == Route::Reduced || (route == Route::Auto && reducible);
  if (!reduced_) return;

  const int k = problem_->inner_dimension(), d = problem_->dimension();
  a_.resize(n_ * k, d);
  c_.resize(n_ * k);
  Matrix ai(k, d);
  Vector ci(k);
  Vector shared_mean;
  if (v.shared) shared_mean = column_mean(v.block(0));
  for (std::int64_t i = 0; i < n_; ++i) {
    const Vector eta_bar = v.shared ? shared_mean : column_mean(v.block(i));
    problem_->inner_affine(v.outer->col(i), eta_bar, ai, ci);
    a_.middleRows(i * k, k) = ai;
    c_.segment(i * k, k) = ci;
  }
}

const Matrix& SaaObjective::stacked_matrix() const {
  if (!reduced_) throw ConfigError("SaaObjective: not in reduced form");
  return a_;
}
const Vector& SaaObjective::stacked_offset() const {
  if (!reduced_) throw ConfigError("SaaObjective: not in reduced form");
  return c_;
}
ConstVectorRef SaaObjective::outer_sample(std::int64_t i) const {
  return view(*dataset_).outer->col(i);
}

double SaaObjective::value(ConstVectorRef x) const { return evaluate(x, nullptr); }

Vector SaaObjective::subgradient(ConstVectorRef x) const {
  Vector g(dimension());
  VectorRef ref(g);
  evaluate(x, &ref);
  return g;
}

double SaaObjective::value_and_subgradient(ConstVectorRef x, VectorRef grad) const {
  return evaluate(x, &grad);
}

double SaaObjective::evaluate(ConstVectorRef x, VectorRef* grad) const {
  if (x.size() != dimension()) throw ConfigError("SaaObjective: dimension mismatch");
  const double base = reduced_ ? evaluate_reduced(x, grad) : evaluate_generic(x, grad);
  if (mu_ > 0.0) {
    if (grad) *grad += mu_ * x;
    return base + 0.5 * mu_ * x.squaredNorm();
  }
  return base;
}

double SaaObjective::evaluate_reduced(ConstVectorRef x, VectorRef* grad) const {
  const int k = problem_->inner_dimension();
  const DatasetView v = view(*dataset_);
  const Vector u = a_ * x + c_;
  CompensatedSum total;
  Vector w;
  if (grad) w.resize(u.size());
  for (std::int64_t i = 0; i < n_; ++i) {
    const auto ui = u.segment(i * k, k);
    total.add(problem_->outer_value(ui, v.outer->col(i)));
    if (grad) problem_->outer_gradient(ui, v.outer->col(i), w.segment(i * k, k));
  }
  const double inv_n = 1.0 / static_cast<double>(n_);
  if (grad) grad->noalias() = a_.transpose() * w * inv_n;
  return total.value() * inv_n;
}

double SaaObjective::evaluate_generic(ConstVectorRef x, VectorRef* grad) const {
  const int k = problem_->inner_dimension(), d = problem_->dimension();
  const DatasetView v = view(*dataset_);
  const double inv_m = 1.0 / static_cast<double>(v.m);
  Vector g(k), u(k), w(k);
  Matrix jac(k, d);
  Matrix jbar(k, d);
  std::vector<CompensatedSum> acc(k);
  CompensatedSum total;
  if (grad) grad->setZero();
  for (std::int64_t i = 0; i < n_; ++i) {
    const auto xi = v.outer->col(i);
    const auto block = v.block(i);
    for (auto& a : acc) a = CompensatedSum{};
    if (grad) jbar.setZero();
    for (std::int64_t j = 0; j < v.m; ++j) {
      problem_->inner_value(x, xi, block.col(j), g);
      for (int r = 0; r < k; ++r) acc[r].add(g[r]);
      if (grad) {
        problem_->inner_jacobian(x, xi, block.col(j), jac);
        jbar += jac;
      }
    }
    for (int r = 0; r < k; ++r) u[r] = acc[r].value() * inv_m;
    total.add(problem_->outer_value(u, xi));
    if (grad) {
      problem_->outer_gradient(u, xi, w);
      grad->noalias() += (jbar * inv_m).transpose() * w;
    }
  }
  const double inv_n = 1.0 / static_cast<double>(n_);
  if (grad) *grad *= inv_n;
  return total.value() * inv_n;
}

namespace {

nlohmann::ordered_json vector_json(const Vector& x) {
  auto arr = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < x.size(); ++i) arr.push_back(x[i]);
  return arr;
}

}  // namespace

std::string to_json(const MseProbeReport& r) {
  nlohmann::ordered_json j;
  j["x"] = vector_json(r.x);
  j["replications"] = r.replications;
  j["bias_hat"] = r.bias_hat;
  j["var_hat"] = r.var_hat;
  j["mse_hat"] = r.mse_hat;
  j["bias_se"] = r.bias_se;
  j["var_se"] = r.var_se;
  j["mse_se"] = r.mse_se;
  j["bias_bound"] = r.bias_bound;
  j["var_bound"] = r.var_bound;
  j["objective"] = r.objective;
  j["objective_se"] = r.objective_se;
  j["n"] = r.n;
  j["m"] = r.m;
  j["scheme"] = to_string(r.scheme);
  return j.dump();
}

std::string mse_probe_csv_header() {
  return "x,replications,bias_hat,var_hat,mse_hat,bias_se,var_se,mse_se,bias_bound,var_bound";
}

std::string to_csv_row(const MseProbeReport& r) {
  std::ostringstream os;
  for (Eigen::Index i = 0; i < r.x.size(); ++i) os << (i ? ";" : "") << format_double(r.x[i]);
  os << ',' << r.replications;
  for (double v : {r.bias_hat, r.var_hat, r.mse_hat, r.bias_se, r.var_se, r.mse_se, r.bias_bound,
                   r.var_bound})
    os << ',' << format_double(v);
  return os.str();
}

MseProbeReport mse_probe(std::shared_ptr<const CsoProblem> problem, ConstVectorRef x,
                         std::int64_t n, std::int64_t m, Scheme scheme, std::int64_t replications,
                         std::uint64_t seed, const OracleSpec& oracle, int threads) {
  if (!problem) throw ConfigError("mse_probe: null problem");
  if (replications < 30) throw ConfigError("mse_probe: needs at least 30 replications");
  if (n < 1 || m < 1) throw ConfigError("mse_probe: n and m must be >= 1");
  if (!in_domain(*problem, x)) throw ConfigError("mse_probe: x outside the domain");

  // x is fixed before any sample is drawn.
  const ObjectiveEstimate truth = true_objective(*problem, x, oracle);

  std::vector<double> values(static_cast<std::size_t>(replications));
  parallel_for(replications, threads, [&](std::int64_t r) {
    const std::uint64_t s = derive_seed(seed, "mse_probe", static_cast<std::uint64_t>(r));
    auto ds = std::make_shared<const Dataset>(sample(*problem, scheme, n, m, s));
    SaaObjective obj(problem, ds);
    const double v = obj.value(x);
    if (!std::isfinite(v)) throw RuntimeFailure("mse_probe: non-finite objective value");
    values[static_cast<std::size_t>(r)] = v;
  });

  const auto R = static_cast<double>(replications);
  CompensatedSum s1;
  for (double v : values) s1.add(v);
  const double mean = s1.value() / R;
  CompensatedSum c2, c4, e2, e4;
  for (double v : values) {
    const double dv = v - mean;
    c2.add(dv * dv);
    c4.add(dv * dv * dv * dv);
    const double ev = (v - truth.value) * (v - truth.value);
    e2.add(ev);
    e4.add(ev * ev);
  }
  const double central2 = c2.value() / R;
  const double central4 = c4.value() / R;

  MseProbeReport rep;
  rep.x = x;
  rep.replications = replications;
  rep.n = n;
  rep.m = m;
  rep.scheme = scheme;
  rep.objective = truth.value;
  rep.objective_se = truth.std_error;
  rep.bias_hat = mean - truth.value;
  rep.var_hat = c2.value() / (R - 1.0);
  rep.mse_hat = e2.value() / R;
  rep.bias_se = std::sqrt(rep.var_hat / R + truth.std_error * truth.std_error);
  rep.var_se = std::sqrt(std::max(0.0, central4 - central2 * central2) / R);
  const double mse_var = std::max(0.0, e4.value() / R - rep.mse_hat * rep.mse_hat);
  const double oracle_part = 2.0 * rep.bias_hat * truth.std_error;
  rep.mse_se = std::sqrt(mse_var / R + oracle_part * oracle_part);

  const BoundInputs in = bound_inputs(*problem, Regime::CondLipschitz, 1.0, 0.5);
  const bool smooth = problem->smooth_outer() && problem->constants().smoothness.has_value();
  const BiasVarianceBounds b = bias_variance_bounds(in, n, m, smooth);
  rep.bias_bound = b.bias_bound;
  rep.var_bound = b.var_bound;
  return rep;
}

}  // namespace cso
