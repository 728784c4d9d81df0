#include "cso/instances.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "cso/huber.hpp"

namespace cso {

namespace detail {

double softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779;

double std_normal_pdf(double t) { return kInvSqrt2Pi * std::exp(-0.5 * t * t); }

template <class F>
double integrate_segments(F f, std::vector<double> points) {
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    double err = 0.0;
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        f, points[i], points[i + 1], 8, 1e-11, &err);
  }
  return total;
}

}  // namespace

double logistic_population_loss(double norm_x, double rho, double sigma) {
  // With u = a' v / |v|, the loss is E l(sigma |x| t) weighted by
  // P(sign agrees | t), t ~ N(0, 1), l(z) = log(1 + exp(-z)):
  //   F = 2 * int phi(t) l(s t) Phi(kappa t) dt,
  //   s = sigma |x|, kappa = rho / sqrt(1 - rho^2).
  if (norm_x == 0.0) return std::numbers::ln2;
  rho = std::clamp(rho, -1.0, 1.0);
  const double s = sigma * norm_x;
  constexpr double kLimit = 12.0;
  const double one_minus = 1.0 - rho * rho;

  std::vector<double> points{-kLimit, 0.0, kLimit};
  for (double c : {0.25, 1.0, 4.0, 16.0, 64.0}) {
    if (c / s < kLimit) {
      points.push_back(c / s);
      points.push_back(-c / s);
    }
  }

  if (one_minus <= 1e-28) {
    const bool positive = rho > 0.0;
    auto f = [&](double t) {
      if ((t > 0.0) != positive) return 0.0;
      return 2.0 * std_normal_pdf(t) * softplus(-s * t);
    };
    return integrate_segments(f, points);
  }

  const double kappa = rho / std::sqrt(one_minus);
  if (kappa != 0.0) {
    for (double c : {0.5, 2.0, 6.0}) {
      const double p = c / std::abs(kappa);
      if (p < kLimit) {
        points.push_back(p);
        points.push_back(-p);
      }
    }
  }
  auto f = [&](double t) {
    const double agree = 0.5 * std::erfc(-kappa * t / std::numbers::sqrt2);
    return 2.0 * std_normal_pdf(t) * softplus(-s * t) * agree;
  };
  return integrate_segments(f, points);
}

double gaussian_huber_expectation(double s, double gamma) {
  if (!(s >= 0.0)) throw ConfigError("gaussian_huber_expectation: negative scale");
  if (s == 0.0) return 0.0;
  if (gamma == 0.0) return s * std::sqrt(2.0 / std::numbers::pi);
  const double a = gamma / s;
  const double z = a / std::numbers::sqrt2;
  return s * s / (2.0 * gamma) * std::erf(z) + s * std_normal_pdf(a) -
         0.5 * gamma * std::erfc(z);
}

}  // namespace detail

namespace {

using detail::sigmoid;
using detail::softplus;

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

void check_common(int d, double sigma_xi2, double sigma_eta2, const Vector& x_star,
                  double radius, const std::string& who) {
  require(d >= 1, who + ": d must be >= 1");
  require(sigma_xi2 > 0.0 && std::isfinite(sigma_xi2), who + ": sigma_xi2 must be > 0");
  require(sigma_eta2 >= 0.0 && std::isfinite(sigma_eta2), who + ": sigma_eta2 must be >= 0");
  require(radius > 0.0 && std::isfinite(radius), who + ": domain_radius must be > 0");
  require(x_star.size() == d, who + ": x_star must have length d");
  require(x_star.allFinite(), who + ": x_star must be finite");
}

// High-probability bound on |a + noise|_2 with a ~ N(0, sxi2 I), noise ~ N(0, seta2 I).
double gaussian_norm_bound(int d, double sxi2, double seta2) {
  return std::sqrt(sxi2 + seta2) * (std::sqrt(static_cast<double>(d)) + kGaussianTail);
}

// ---------------------------------------------------------------------------
// Logistic: xi = (a_1..a_d, b).

class LogisticProblem final : public CsoProblem {
 public:
  LogisticProblem(int d, double sigma_xi2, double sigma_eta2, Vector x_star, double radius,
                  bool independent)
      : CsoProblem(d, 1, d + 1, d, radius),
        sigma_xi_(std::sqrt(sigma_xi2)),
        sigma_eta_(std::sqrt(sigma_eta2)),
        x_star_(std::move(x_star)),
        independent_(independent) {
    require(x_star_.norm() > 0.0, name() + ": x_star must be nonzero");
    ProblemConstants c;
    c.lipschitz_outer = 1.0;
    c.smoothness = 0.25;
    c.lipschitz_inner = gaussian_norm_bound(d, sigma_xi2, sigma_eta2);
    c.bound_inner = c.lipschitz_inner * radius;
    c.bound_outer = softplus(c.bound_inner);
    c.variance_inner = sigma_eta2 * radius * radius;
    // Var f <= E f^2 <= E (log 2 + |a' x|)^2 with |x| <= R.
    const double s = sigma_xi_ * radius;
    const double ln2 = std::numbers::ln2;
    c.variance_outer = ln2 * ln2 + 2.0 * ln2 * s * std::sqrt(2.0 / std::numbers::pi) + s * s;
    set_constants(c);
  }

  std::string name() const override {
    return independent_ ? "IndependentLogistic" : "RobustLogistic";
  }
  bool smooth_outer() const override { return true; }
  bool independent_inner() const override { return independent_; }

  double outer_value(ConstVectorRef u, ConstVectorRef xi) const override {
    return softplus(-label(xi) * u[0]);
  }
  void outer_gradient(ConstVectorRef u, ConstVectorRef xi, VectorRef out) const override {
    const double b = label(xi);
    out[0] = -b * sigmoid(-b * u[0]);
  }

  void inner_value(ConstVectorRef x, ConstVectorRef xi, ConstVectorRef eta,
                   VectorRef out) const override {
    out[0] = eta.dot(x);
    if (independent_) out[0] += features(xi).dot(x);
  }
  void inner_jacobian(ConstVectorRef, ConstVectorRef xi, ConstVectorRef eta,
                      MatrixRef out) const override {
    out.row(0) = eta.transpose();
    if (independent_) out.row(0) += features(xi).transpose();
  }
  bool affine_inner() const override { return true; }
  bool inner_linear_in_eta() const override { return true; }
  void inner_affine(ConstVectorRef xi, ConstVectorRef eta, MatrixRef a_out,
                    VectorRef c_out) const override {
    a_out.row(0) = eta.transpose();
    if (independent_) a_out.row(0) += features(xi).transpose();
    c_out[0] = 0.0;
  }

  void sample_outer(Rng& rng, VectorRef xi) const override {
    const int d = dimension();
    for (int j = 0; j < d; ++j) xi[j] = sigma_xi_ * rng.gaussian();
    xi[d] = xi.head(d).dot(x_star_) >= 0.0 ? 1.0 : -1.0;
  }
  void sample_inner(ConstVectorRef xi, Rng& rng, VectorRef eta) const override {
    const int d = dimension();
    if (independent_) {
      for (int j = 0; j < d; ++j) eta[j] = sigma_eta_ * rng.gaussian();
    } else if (sigma_eta_ == 0.0) {
      eta = features(xi);
    } else {
      for (int j = 0; j < d; ++j) eta[j] = xi[j] + sigma_eta_ * rng.gaussian();
    }
  }
  void conditional_eta_mean(ConstVectorRef xi, VectorRef out) const override {
    if (independent_)
      out.setZero();
    else
      out = features(xi);
  }

  std::optional<double> closed_form_objective(ConstVectorRef x) const override {
    const double nx = x.norm();
    const double rho = nx > 0.0 ? x.dot(x_star_) / (nx * x_star_.norm()) : 1.0;
    return detail::logistic_population_loss(nx, rho, sigma_xi_);
  }
  // Attained at R x_star / |x_star|.
  std::optional<double> closed_form_optimal_value() const override {
    return detail::logistic_population_loss(domain_radius(), 1.0, sigma_xi_);
  }

 private:
  ConstVectorRef features(ConstVectorRef xi) const {
    return xi.head(dimension());
  }
  double label(ConstVectorRef xi) const { return xi[dimension()]; }

  double sigma_xi_;
  double sigma_eta_;
  Vector x_star_;
  bool independent_;
};

// ---------------------------------------------------------------------------
// Least absolute value regression and its Huber smoothing: xi = (a, b).

class LavProblem final : public CsoProblem {
 public:
  LavProblem(const LavRegressionSpec& s)
      : CsoProblem(s.d, 1, s.d + 1, s.d, s.domain_radius),
        sigma_xi_(std::sqrt(s.sigma_xi2)),
        sigma_eta_(std::sqrt(s.sigma_eta2)),
        x_star_(s.x_star),
        gamma_(std::holds_alternative<HuberSmoothing>(s.smoothing)
                   ? std::get<HuberSmoothing>(s.smoothing).gamma
                   : 0.0) {
    require(gamma_ >= 0.0 && std::isfinite(gamma_), "LavRegression: gamma must be >= 0");
    require(x_star_.norm() <= s.domain_radius, "LavRegression: x_star must lie in the domain");
    ProblemConstants c;
    c.lipschitz_outer = 1.0;
    if (gamma_ > 0.0) c.smoothness = 1.0 / gamma_;
    c.lipschitz_inner = gaussian_norm_bound(s.d, s.sigma_xi2, s.sigma_eta2);
    c.bound_inner = c.lipschitz_inner * s.domain_radius;
    const double label_bound =
        sigma_xi_ * (std::sqrt(static_cast<double>(s.d)) + kGaussianTail) * x_star_.norm();
    c.bound_outer = c.bound_inner + label_bound;
    c.variance_inner = s.sigma_eta2 * s.domain_radius * s.domain_radius;
    // Var f <= E (a'(x - x_star))^2 <= sigma_xi^2 (R + |x_star|)^2.
    const double spread = s.domain_radius + x_star_.norm();
    c.variance_outer = s.sigma_xi2 * spread * spread;
    set_constants(c);
  }

  std::string name() const override { return gamma_ > 0.0 ? "LavHuber" : "LavRegression"; }
  bool smooth_outer() const override { return gamma_ > 0.0; }
  bool independent_inner() const override { return false; }

  double outer_value(ConstVectorRef u, ConstVectorRef xi) const override {
    return huber(u[0] - label(xi), gamma_);
  }
  void outer_gradient(ConstVectorRef u, ConstVectorRef xi, VectorRef out) const override {
    out[0] = huber_grad(u[0] - label(xi), gamma_);
  }
  bool has_outer_prox() const override { return true; }
  void outer_prox(ConstVectorRef v, ConstVectorRef xi, double t, VectorRef out) const override {
    const double b = label(xi);
    out[0] = b + huber_prox(v[0] - b, gamma_, t);
  }

  void inner_value(ConstVectorRef x, ConstVectorRef, ConstVectorRef eta,
                   VectorRef out) const override {
    out[0] = eta.dot(x);
  }
  void inner_jacobian(ConstVectorRef, ConstVectorRef, ConstVectorRef eta,
                      MatrixRef out) const override {
    out.row(0) = eta.transpose();
  }
  bool affine_inner() const override { return true; }
  bool inner_linear_in_eta() const override { return true; }
  void inner_affine(ConstVectorRef, ConstVectorRef eta, MatrixRef a_out,
                    VectorRef c_out) const override {
    a_out.row(0) = eta.transpose();
    c_out[0] = 0.0;
  }

  void sample_outer(Rng& rng, VectorRef xi) const override {
    const int d = dimension();
    for (int j = 0; j < d; ++j) xi[j] = sigma_xi_ * rng.gaussian();
    xi[d] = xi.head(d).dot(x_star_);
  }
  void sample_inner(ConstVectorRef xi, Rng& rng, VectorRef eta) const override {
    const int d = dimension();
    if (sigma_eta_ == 0.0) {
      eta = xi.head(d);
      return;
    }
    for (int j = 0; j < d; ++j) eta[j] = xi[j] + sigma_eta_ * rng.gaussian();
  }
  void conditional_eta_mean(ConstVectorRef xi, VectorRef out) const override {
    out = xi.head(dimension());
  }

  // The residual a'x - b = a'(x - x_star) is N(0, sigma_xi^2 |x - x_star|^2).
  std::optional<double> closed_form_objective(ConstVectorRef x) const override {
    return detail::gaussian_huber_expectation(sigma_xi_ * (x - x_star_).norm(), gamma_);
  }
  std::optional<double> analytic_optimal_value() const override { return 0.0; }

 private:
  double label(ConstVectorRef xi) const { return xi[dimension()]; }

  double sigma_xi_;
  double sigma_eta_;
  Vector x_star_;
  double gamma_;
};

// ---------------------------------------------------------------------------

class Huber1DProblem final : public CsoProblem {
 public:
  explicit Huber1DProblem(const Huber1DSpec& s)
      : CsoProblem(1, 1, 0, 1, s.domain_radius), gamma_(s.gamma), sigma_(std::sqrt(s.sigma_eta2)) {
    ProblemConstants c;
    const double u_max = s.domain_radius + kGaussianTail * sigma_;
    c.lipschitz_outer = 1.0 + 2.0 * u_max;
    if (gamma_ > 0.0) c.smoothness = 1.0 / gamma_ + 2.0;
    c.lipschitz_inner = 1.0;
    c.bound_inner = u_max;
    c.bound_outer = huber(u_max, gamma_) + u_max * u_max;
    c.variance_inner = s.sigma_eta2;
    c.variance_outer = 0.0;
    // f is 2-strongly convex.
    c.error_bound = ErrorBoundParams{1.0, 1.0};
    set_constants(c);
  }

  std::string name() const override { return "Huber1D"; }
  bool smooth_outer() const override { return gamma_ > 0.0; }
  bool independent_inner() const override { return true; }

  double outer_value(ConstVectorRef u, ConstVectorRef) const override {
    return huber(u[0], gamma_) + u[0] * u[0];
  }
  void outer_gradient(ConstVectorRef u, ConstVectorRef, VectorRef out) const override {
    out[0] = huber_grad(u[0], gamma_) + 2.0 * u[0];
  }
  bool has_outer_prox() const override { return true; }
  void outer_prox(ConstVectorRef v, ConstVectorRef, double t, VectorRef out) const override {
    // t (H + w^2) + (w - v)^2 / 2 = (1 + 2t) [ t' H + (w - v')^2 / 2 ] + const.
    const double scale = 1.0 + 2.0 * t;
    out[0] = huber_prox(v[0] / scale, gamma_, t / scale);
  }

  void inner_value(ConstVectorRef x, ConstVectorRef, ConstVectorRef eta,
                   VectorRef out) const override {
    out[0] = x[0] + eta[0];
  }
  void inner_jacobian(ConstVectorRef, ConstVectorRef, ConstVectorRef, MatrixRef out) const override {
    out(0, 0) = 1.0;
  }
  bool affine_inner() const override { return true; }
  bool inner_linear_in_eta() const override { return true; }
  void inner_affine(ConstVectorRef, ConstVectorRef eta, MatrixRef a_out,
                    VectorRef c_out) const override {
    a_out(0, 0) = 1.0;
    c_out[0] = eta[0];
  }

  void sample_outer(Rng&, VectorRef) const override {}
  void sample_inner(ConstVectorRef, Rng& rng, VectorRef eta) const override {
    eta[0] = sigma_ == 0.0 ? 0.0 : sigma_ * rng.gaussian();
  }
  void conditional_eta_mean(ConstVectorRef, VectorRef out) const override { out[0] = 0.0; }

  std::optional<double> closed_form_objective(ConstVectorRef x) const override {
    return huber(x[0], gamma_) + x[0] * x[0];
  }
  std::optional<double> analytic_optimal_value() const override { return 0.0; }

  double gamma() const { return gamma_; }

 private:
  double gamma_;
  double sigma_;
};

// ---------------------------------------------------------------------------

class SineQGProblem final : public CsoProblem {
 public:
  explicit SineQGProblem(const SineQGSpec& s)
      : CsoProblem(1, 1, 1, 1, s.domain_radius), offset_(s.inner_offset) {
    const double eta_max = offset_ + 2.0;
    ProblemConstants c;
    c.lipschitz_inner = eta_max;
    c.bound_inner = eta_max * s.domain_radius;
    c.lipschitz_outer = 2.0 * c.bound_inner + 3.0;
    c.smoothness = 8.0;  // |2 + 6 cos 2u| <= 8
    c.bound_outer = c.bound_inner * c.bound_inner + 3.0;
    c.variance_inner = s.domain_radius * s.domain_radius / 12.0;
    c.variance_outer = c.bound_outer * c.bound_outer / 4.0;
    c.error_bound = ErrorBoundParams{s.mu, 1.0};
    set_constants(c);
  }

  std::string name() const override { return "SineQG"; }
  bool smooth_outer() const override { return true; }
  bool independent_inner() const override { return false; }

  double outer_value(ConstVectorRef u, ConstVectorRef) const override {
    const double sn = std::sin(u[0]);
    return u[0] * u[0] + 3.0 * sn * sn;
  }
  void outer_gradient(ConstVectorRef u, ConstVectorRef, VectorRef out) const override {
    out[0] = 2.0 * u[0] + 3.0 * std::sin(2.0 * u[0]);
  }

  void inner_value(ConstVectorRef x, ConstVectorRef, ConstVectorRef eta,
                   VectorRef out) const override {
    out[0] = eta[0] * x[0];
  }
  void inner_jacobian(ConstVectorRef, ConstVectorRef, ConstVectorRef eta,
                      MatrixRef out) const override {
    out(0, 0) = eta[0];
  }
  bool affine_inner() const override { return true; }
  bool inner_linear_in_eta() const override { return true; }
  void inner_affine(ConstVectorRef, ConstVectorRef eta, MatrixRef a_out,
                    VectorRef c_out) const override {
    a_out(0, 0) = eta[0];
    c_out[0] = 0.0;
  }

  void sample_outer(Rng& rng, VectorRef xi) const override { xi[0] = rng.uniform(); }
  void sample_inner(ConstVectorRef xi, Rng& rng, VectorRef eta) const override {
    eta[0] = offset_ + xi[0] + rng.uniform();
  }
  void conditional_eta_mean(ConstVectorRef xi, VectorRef out) const override {
    out[0] = offset_ + xi[0] + 0.5;
  }

  // E[eta | xi] = c + 1/2 + xi with xi ~ U(0, 1).
  std::optional<double> closed_form_objective(ConstVectorRef xv) const override {
    const double x = xv[0];
    const double lo = offset_ + 0.5;
    const double second_moment = 1.0 / 12.0 + (lo + 0.5) * (lo + 0.5);
    double mean_cos = 1.0;
    if (x != 0.0) mean_cos = (std::sin(2.0 * (lo + 1.0) * x) - std::sin(2.0 * lo * x)) / (2.0 * x);
    return second_moment * x * x + 1.5 * (1.0 - mean_cos);
  }
  std::optional<double> analytic_optimal_value() const override { return 0.0; }

 private:
  double offset_;
};

}  // namespace

std::shared_ptr<const CsoProblem> build(const InstanceSpec& spec) {
  return std::visit(
      [](const auto& s) -> std::shared_ptr<const CsoProblem> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, RobustLogisticSpec>) {
          check_common(s.d, s.sigma_xi2, s.sigma_eta2, s.x_star, s.domain_radius, "RobustLogistic");
          return std::make_shared<LogisticProblem>(s.d, s.sigma_xi2, s.sigma_eta2, s.x_star,
                                                   s.domain_radius, false);
        } else if constexpr (std::is_same_v<T, IndependentLogisticSpec>) {
          check_common(s.d, s.sigma_xi2, s.sigma_eta2, s.x_star, s.domain_radius,
                       "IndependentLogistic");
          return std::make_shared<LogisticProblem>(s.d, s.sigma_xi2, s.sigma_eta2, s.x_star,
                                                   s.domain_radius, true);
        } else if constexpr (std::is_same_v<T, LavRegressionSpec>) {
          check_common(s.d, s.sigma_xi2, s.sigma_eta2, s.x_star, s.domain_radius, "LavRegression");
          return std::make_shared<LavProblem>(s);
        } else if constexpr (std::is_same_v<T, Huber1DSpec>) {
          require(s.gamma >= 0.0 && std::isfinite(s.gamma), "Huber1D: gamma must be >= 0");
          require(s.sigma_eta2 >= 0.0 && std::isfinite(s.sigma_eta2),
                  "Huber1D: sigma_eta2 must be >= 0");
          require(s.domain_radius > 0.0, "Huber1D: domain_radius must be > 0");
          return std::make_shared<Huber1DProblem>(s);
        } else {
          require(s.mu > 0.0 && std::isfinite(s.mu), "SineQG: mu must be > 0");
          require(s.inner_offset >= std::sqrt(s.mu), "SineQG: inner_offset must be >= sqrt(mu)");
          require(s.domain_radius > 0.0, "SineQG: domain_radius must be > 0");
          return std::make_shared<SineQGProblem>(s);
        }
      },
      spec);
}

std::string instance_tag(const InstanceSpec& spec) {
  struct Visitor {
    std::string operator()(const RobustLogisticSpec&) const { return "RobustLogistic"; }
    std::string operator()(const IndependentLogisticSpec&) const { return "IndependentLogistic"; }
    std::string operator()(const LavRegressionSpec& s) const {
      return std::holds_alternative<HuberSmoothing>(s.smoothing) ? "LavHuber" : "LavRegression";
    }
    std::string operator()(const Huber1DSpec&) const { return "Huber1D"; }
    std::string operator()(const SineQGSpec&) const { return "SineQG"; }
  };
  return std::visit(Visitor{}, spec);
}

}  // namespace cso
