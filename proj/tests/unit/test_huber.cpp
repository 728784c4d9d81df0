#include <cmath>
#include <random>

#include "doctest.h"

#include "cso/huber.hpp"
#include "cso/types.hpp"

using namespace cso;

TEST_SUITE("huber") {

TEST_CASE("branch values") {
  CHECK(huber(0.05, 0.1) == doctest::Approx(0.0125).epsilon(1e-14));
  CHECK(huber(1.0, 0.1) == doctest::Approx(0.95).epsilon(1e-14));
  for (double g : {0.0, 0.1, 1.0, 10.0}) CHECK(huber(0.0, g) == 0.0);
  CHECK(huber(-2.0, 0.0) == 2.0);
  CHECK(huber(-0.05, 0.1) == doctest::Approx(0.0125));
}

TEST_CASE("gradient branches and the tie-break at zero") {
  CHECK(huber_grad(0.05, 0.1) == doctest::Approx(0.5));
  CHECK(huber_grad(-3.0, 0.1) == -1.0);
  CHECK(huber_grad(3.0, 0.0) == 1.0);
  CHECK(huber_grad(0.0, 0.0) == 0.0);
}

TEST_CASE("negative gamma is rejected") {
  CHECK_THROWS_AS(huber(1.0, -0.1), ConfigError);
  CHECK_THROWS_AS(huber_grad(1.0, -0.1), ConfigError);
  CHECK_THROWS_AS(huber_prox(1.0, -0.1, 1.0), ConfigError);
}

TEST_CASE("continuity and one-sided derivatives at the knee") {
  for (double g : {0.01, 0.1, 1.0, 5.0}) {
    for (double e : {1e-3, 1e-5, 1e-7}) {
      CHECK(std::abs(huber(g, g) - huber(g + e, g)) <= 2.0 * e);
      CHECK(std::abs(huber(-g, g) - huber(-g - e, g)) <= 2.0 * e);
    }
    const double h = 1e-7;
    const double left = (huber(g, g) - huber(g - h, g)) / h;
    const double right = (huber(g + h, g) - huber(g, g)) / h;
    CHECK(std::abs(left - huber_grad(g, g)) <= 1e-6 + h / g);
    CHECK(std::abs(right - huber_grad(g, g)) <= 1e-6);
  }
}

TEST_CASE("distance to the absolute value is at most gamma / 2") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-20.0, 20.0), gd(0.0, 5.0);
  for (int i = 0; i < 10000; ++i) {
    const double x = u(rng), g = gd(rng);
    CHECK(std::abs(huber(x, g) - std::abs(x)) <= g / 2.0 + 1e-12);
  }
}

TEST_CASE("gradient matches central differences away from the knee") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const double g = 0.7, h = 1e-6;
  for (int i = 0; i < 200; ++i) {
    const double x = u(rng);
    if (std::abs(std::abs(x) - g) < 1e-3) continue;
    const double fd = (huber(x + h, g) - huber(x - h, g)) / (2.0 * h);
    CHECK(fd == doctest::Approx(huber_grad(x, g)).epsilon(1e-6));
  }
}

TEST_CASE("prox minimizes t H(w) + (w - v)^2 / 2") {
  // Oracle: dense grid search refined by golden section.
  auto brute = [](double v, double g, double t) {
    auto obj = [&](double w) { return t * huber(w, g) + 0.5 * (w - v) * (w - v); };
    double lo = std::min(v, 0.0) - 1.0, hi = std::max(v, 0.0) + 1.0;
    for (int it = 0; it < 200; ++it) {
      const double a = lo + (hi - lo) * 0.381966, b = lo + (hi - lo) * 0.618034;
      if (obj(a) < obj(b)) hi = b; else lo = a;
    }
    return 0.5 * (lo + hi);
  };
  for (double g : {0.0, 0.1, 1.0})
    for (double t : {0.05, 0.5, 3.0})
      for (double v : {-4.0, -1.05, -0.2, 0.0, 0.03, 0.6, 2.5})
        CHECK(huber_prox(v, g, t) == doctest::Approx(brute(v, g, t)).epsilon(1e-7).scale(1.0));
}

}
