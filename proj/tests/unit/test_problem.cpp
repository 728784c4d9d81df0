#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"

#include "cso/instances.hpp"
#include "cso/huber.hpp"
#include "cso/saa.hpp"
#include "support.hpp"

using namespace cso;

namespace {

Vector unit_ones(int d) { return Vector::Constant(d, 1.0 / std::sqrt(static_cast<double>(d))); }

std::vector<InstanceSpec> all_instances() {
  return {RobustLogisticSpec{10, 1.0, 10.0, unit_ones(10)},
          IndependentLogisticSpec{10, 1.0, 10.0, unit_ones(10)},
          LavRegressionSpec{20, 1.0, 10.0, unit_ones(20), NoSmoothing{}},
          LavRegressionSpec{20, 1.0, 10.0, unit_ones(20), HuberSmoothing{0.1}},
          Huber1DSpec{0.1, 1.0},
          Huber1DSpec{0.0, 1.0},
          SineQGSpec{1.0, 1.0}};
}

Vector random_in_ball(std::mt19937_64& rng, int d, double R) {
  std::normal_distribution<double> z;
  std::uniform_real_distribution<double> u;
  Vector x(d);
  for (int j = 0; j < d; ++j) x[j] = z(rng);
  return x * (R * std::pow(u(rng), 1.0 / d) / x.norm());
}

// Independent 2-D quadrature for the logistic population loss in polar
// coordinates of the plane span(x, x_star): t1 = r cos(theta) along x. The
// label is constant on each half-plane, so theta is split at the two
// boundary angles and integrated with composite Simpson on each arc.
double logistic_polar(const Vector& x, const Vector& x_star, double sigma) {
  const double nx = x.norm();
  const double rho = std::clamp(x.dot(x_star) / (nx * x_star.norm()), -1.0, 1.0);
  const double phi = std::acos(rho);  // direction of x_star relative to x
  const double s = sigma * nx;
  auto simpson = [](auto&& f, double a, double b, int n) {
    const double h = (b - a) / n;
    double acc = f(a) + f(b);
    for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return acc * h / 3.0;
  };
  auto arc = [&](double a, double b, double label) {
    return simpson([&](double th) {
      const double c = std::cos(th);
      return simpson([&](double r) { return r * std::exp(-0.5 * r * r) * detail::softplus(-label * s * r * c); },
                     0.0, 14.0, 3000);
    }, a, b, 1000);
  };
  const double pi = std::numbers::pi;
  // b = +1 where cos(theta - phi) >= 0.
  const double total = arc(phi - pi / 2, phi + pi / 2, 1.0) + arc(phi + pi / 2, phi + 3 * pi / 2, -1.0);
  return total / (2.0 * pi);
}

}  // namespace

TEST_SUITE("problem") {

TEST_CASE("build: RobustLogistic shapes") {
  auto p = build(RobustLogisticSpec{10, 1.0, 10.0, unit_ones(10)});
  CHECK(p->dimension() == 10);
  // Scalar inner map u = eta' x; the outer loss acts on one number.
  CHECK(p->inner_dimension() == 1);
  CHECK(p->domain_radius() == 100.0);
  CHECK(p->smooth_outer());
  CHECK_FALSE(p->independent_inner());
}

TEST_CASE("build: Huber1D with gamma 0 is nonsmooth") {
  auto p = build(Huber1DSpec{0.0, 1.0});
  CHECK(p->dimension() == 1);
  CHECK(p->inner_dimension() == 1);
  CHECK_FALSE(p->smooth_outer());
  CHECK(p->independent_inner());
}

TEST_CASE("build: LAV with zero inner variance returns eta = a") {
  auto p = build(LavRegressionSpec{20, 1.0, 0.0, unit_ones(20), NoSmoothing{}});
  auto ds = sample_conditional(*p, 5, 4, 11);
  for (std::int64_t i = 0; i < 5; ++i)
    for (std::int64_t j = 0; j < 4; ++j)
      CHECK((ds.inner.col(i * 4 + j) - ds.outer.col(i).head(20)).norm() == 0.0);
}

TEST_CASE("build: invalid parameters are rejected") {
  CHECK_THROWS_AS(build(RobustLogisticSpec{0, 1.0, 1.0, Vector()}), ConfigError);
  CHECK_THROWS_AS(build(RobustLogisticSpec{3, 0.0, 1.0, unit_ones(3)}), ConfigError);
  CHECK_THROWS_AS(build(RobustLogisticSpec{3, 1.0, -1.0, unit_ones(3)}), ConfigError);
  CHECK_THROWS_AS(build(RobustLogisticSpec{3, 1.0, 1.0, unit_ones(3), 0.0}), ConfigError);
  CHECK_THROWS_AS(build(RobustLogisticSpec{3, 1.0, 1.0, unit_ones(4)}), ConfigError);
  CHECK_THROWS_AS(build(IndependentLogisticSpec{3, -1.0, 1.0, unit_ones(3)}), ConfigError);
  CHECK_THROWS_AS(build(LavRegressionSpec{3, 1.0, 1.0, unit_ones(3), HuberSmoothing{-0.1}}),
                  ConfigError);
  CHECK_THROWS_AS(build(Huber1DSpec{-0.1, 1.0}), ConfigError);
  CHECK_THROWS_AS(build(Huber1DSpec{0.1, -1.0}), ConfigError);
  CHECK_THROWS_AS(build(SineQGSpec{0.0, 1.0}), ConfigError);
  CHECK_THROWS_AS(build(SineQGSpec{4.0, 1.0}), ConfigError);  // offset below sqrt(mu)
}

TEST_CASE("instance tags") {
  CHECK(instance_tag(LavRegressionSpec{20, 1.0, 1.0, unit_ones(20), HuberSmoothing{0.1}}) == "LavHuber");
  CHECK(instance_tag(LavRegressionSpec{20, 1.0, 1.0, unit_ones(20), NoSmoothing{}}) == "LavRegression");
  CHECK(instance_tag(Huber1DSpec{}) == "Huber1D");
}

TEST_CASE("true_objective examples") {
  auto h = build(Huber1DSpec{0.1, 1.0});
  CHECK(true_objective(*h, Vector::Constant(1, 0.5), ClosedFormOracle{}).value ==
        doctest::Approx(0.70).epsilon(1e-14));

  auto lg = build(RobustLogisticSpec{10, 1.0, 10.0, unit_ones(10)});
  const Vector zero = Vector::Zero(10);
  CHECK(true_objective(*lg, zero, ClosedFormOracle{}).value == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  const auto mc = true_objective(*lg, zero, MonteCarloOracle{1000, 3});
  CHECK(mc.value == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(mc.std_error < 1e-12);

  auto lav = build(LavRegressionSpec{20, 1.0, 10.0, unit_ones(20), NoSmoothing{}});
  CHECK(true_objective(*lav, unit_ones(20), ClosedFormOracle{}).value == 0.0);
  CHECK(true_objective(*lav, unit_ones(20), MonteCarloOracle{1000, 3}).value == doctest::Approx(0.0).scale(1e-12));
}

TEST_CASE("closed form requested where none exists") {
  test::QuadraticToy toy;
  CHECK_THROWS_AS(true_objective(toy, Vector::Zero(1), ClosedFormOracle{}), ConfigError);
}

TEST_CASE("outer gradients and inner Jacobians match central differences") {
  std::mt19937_64 gen(17);
  for (const auto& spec : all_instances()) {
    auto p = build(spec);
    if (!p->smooth_outer()) continue;
    CAPTURE(p->name());
    Rng rng(23);
    const int d = p->dimension(), k = p->inner_dimension();
    Vector xi(p->xi_dimension()), eta(p->eta_dimension()), u(k), gu(k), up(k), um(k);
    Matrix jac(k, d);
    int checked = 0;
    for (int probe = 0; probe < 100; ++probe) {
      const Vector x = random_in_ball(gen, d, 2.0);
      p->sample_outer(rng, xi);
      p->sample_inner(xi, rng, eta);
      p->inner_value(x, xi, eta, u);
      p->outer_gradient(u, xi, gu);
      for (int r = 0; r < k; ++r) {
        const double h = 1e-6 * std::max(1.0, std::abs(u[r]));
        up = u; um = u;
        up[r] += h; um[r] -= h;
        const double fd = (p->outer_value(up, xi) - p->outer_value(um, xi)) / (2.0 * h);
        CHECK(std::abs(fd - gu[r]) <= 1e-5 * std::max(1.0, std::abs(gu[r])));
      }
      p->inner_jacobian(x, xi, eta, jac);
      for (int c = 0; c < d; ++c) {
        Vector xp = x, xm = x;
        xp[c] += 1e-6; xm[c] -= 1e-6;
        p->inner_value(xp, xi, eta, up);
        p->inner_value(xm, xi, eta, um);
        for (int r = 0; r < k; ++r) {
          const double fd = (up[r] - um[r]) / 2e-6;
          CHECK(std::abs(fd - jac(r, c)) <= 1e-5 * std::max(1.0, std::abs(jac(r, c))));
        }
      }
      ++checked;
    }
    CHECK(checked == 100);
  }
}

TEST_CASE("affine decomposition reproduces the inner map") {
  std::mt19937_64 gen(5);
  for (const auto& spec : all_instances()) {
    auto p = build(spec);
    REQUIRE(p->affine_inner());
    Rng rng(9);
    Vector xi(p->xi_dimension()), eta(p->eta_dimension()), g(1), c(1);
    Matrix A(1, p->dimension());
    for (int t = 0; t < 20; ++t) {
      const Vector x = random_in_ball(gen, p->dimension(), 50.0);
      p->sample_outer(rng, xi);
      p->sample_inner(xi, rng, eta);
      p->inner_value(x, xi, eta, g);
      p->inner_affine(xi, eta, A, c);
      CHECK((A * x + c - g).norm() <= 1e-10 * std::max(1.0, g.norm()));
    }
  }
}

TEST_CASE("declared bounds M_f and M_g hold on sampled inputs") {
  std::mt19937_64 gen(99);
  for (const auto& spec : all_instances()) {
    auto p = build(spec);
    CAPTURE(p->name());
    const auto& c = p->constants();
    Rng rng(101);
    Vector xi(p->xi_dimension()), eta(p->eta_dimension()), u(1);
    for (int t = 0; t < 2000; ++t) {
      Vector x = random_in_ball(gen, p->dimension(), p->domain_radius());
      if (t % 4 == 0) x *= p->domain_radius() / std::max(x.norm(), 1e-12);
      p->sample_outer(rng, xi);
      p->sample_inner(xi, rng, eta);
      p->inner_value(x, xi, eta, u);
      CHECK(u.norm() <= c.bound_inner);
      CHECK(std::abs(p->outer_value(u, xi)) <= c.bound_outer);
    }
  }
}

TEST_CASE("Monte Carlo oracle: two seeds agree within 5 standard errors") {
  auto p = build(RobustLogisticSpec{10, 1.0, 10.0, unit_ones(10)});
  Vector x = Vector::LinSpaced(10, -1.0, 2.0);
  const auto a = true_objective(*p, x, MonteCarloOracle{1'000'000, 1});
  const auto b = true_objective(*p, x, MonteCarloOracle{1'000'000, 2});
  const double pooled = std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error);
  CHECK(std::abs(a.value - b.value) <= 5.0 * pooled);
}

TEST_CASE("logistic quadrature agrees with polar quadrature and with Monte Carlo") {
  const Vector xs = unit_ones(10);
  auto p = build(RobustLogisticSpec{10, 1.0, 10.0, xs});
  std::mt19937_64 gen(7);
  std::vector<Vector> points{xs * 3.0, -xs * 0.5, Vector::Unit(10, 0) * 10.0,
                             random_in_ball(gen, 10, 5.0), random_in_ball(gen, 10, 100.0)};
  for (const Vector& x : points) {
    const double q = *p->closed_form_objective(x);
    CAPTURE(x.norm());
    CHECK(std::abs(q - logistic_polar(x, xs, 1.0)) <= 1e-8 * std::max(1.0, q));
    const auto mc = true_objective(*p, x, MonteCarloOracle{400'000, 13});
    CHECK(std::abs(q - mc.value) <= 5.0 * mc.std_error + 1e-12);
  }
}

TEST_CASE("logistic optimum on the boundary along x_star") {
  const Vector xs = Vector::LinSpaced(10, 0.5, 1.5);
  auto p = build(RobustLogisticSpec{10, 1.0, 10.0, xs});
  const double fstar = *p->closed_form_optimal_value();
  CHECK(fstar == doctest::Approx(*p->closed_form_objective(xs.normalized() * 100.0)).epsilon(1e-10));
  std::mt19937_64 gen(8);
  for (int t = 0; t < 200; ++t) CHECK(*p->closed_form_objective(random_in_ball(gen, 10, 100.0)) >= fstar);
  // Same optimum for the independent variant: the shared shift has mean zero.
  auto q = build(IndependentLogisticSpec{10, 1.0, 10.0, xs});
  CHECK(*q->closed_form_optimal_value() == doctest::Approx(fstar).epsilon(1e-14));
}

TEST_CASE("closed forms for LAV, Huber LAV and SineQG agree with Monte Carlo") {
  std::mt19937_64 gen(31);
  for (const auto& spec : all_instances()) {
    auto p = build(spec);
    CAPTURE(p->name());
    for (int t = 0; t < 3; ++t) {
      const Vector x = random_in_ball(gen, p->dimension(), 3.0);
      const double exact = *p->closed_form_objective(x);
      const auto mc = true_objective(*p, x, MonteCarloOracle{300'000, 77});
      CHECK(std::abs(exact - mc.value) <= 5.0 * mc.std_error + 1e-12);
    }
    CHECK(p->closed_form_optimal_value().has_value());
  }
}

TEST_CASE("SineQG empirical objective grows at least quadratically around 0") {
  auto p = build(SineQGSpec{1.0, 1.0});
  auto ds = std::make_shared<const Dataset>(sample_conditional(*p, 20, 5, 3));
  SaaObjective obj(p, ds);
  const double f0 = obj.value(Vector::Zero(1));
  CHECK(f0 == 0.0);
  for (double x = -100.0; x <= 100.0; x += 0.37)
    CHECK(obj.value(Vector::Constant(1, x)) - f0 >= 1.0 * x * x - 1e-9);
}

TEST_CASE("gaussian_huber_expectation matches numeric integration") {
  for (double s : {0.05, 0.3, 1.0, 4.0})
    for (double g : {0.0, 0.01, 0.1, 1.0, 10.0}) {
      const int N = 200000;
      const double L = 12.0 * s, h = 2.0 * L / N;
      double total = 0.0;
      for (int i = 0; i < N; ++i) {
        const double y = -L + (i + 0.5) * h;
        total += huber(y, g) * std::exp(-0.5 * y * y / (s * s));
      }
      total *= h / (s * std::sqrt(2.0 * std::numbers::pi));
      CHECK(detail::gaussian_huber_expectation(s, g) == doctest::Approx(total).epsilon(1e-8));
    }
}

}
