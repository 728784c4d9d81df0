#include <cmath>
#include <numbers>

#include "doctest.h"

#include "cso/instances.hpp"
#include "cso/sampling.hpp"

using namespace cso;

namespace {
Vector unit_ones(int d) { return Vector::Constant(d, 1.0 / std::sqrt(static_cast<double>(d))); }
}  // namespace

TEST_SUITE("sampling") {

TEST_CASE("allocate examples") {
  auto a = allocate(10000, exponent(1, 2), Scheme::Conditional);
  CHECK(a.n == 100);
  CHECK(a.m == 99);
  CHECK(a.leftover == 0);
  auto b = allocate(10000, exponent(1, 2), Scheme::Independent);
  CHECK(b.n == 100);
  CHECK(b.m == 9900);
  auto c = allocate(1000, exponent(1, 4), Scheme::Conditional);
  CHECK(c.n == 5);
  CHECK(c.m == 199);
  CHECK(c.leftover == 0);
}

TEST_CASE("allocate uses exact floors for rational exponents") {
  CHECK(allocate(1000, exponent(1, 3), Scheme::Independent).n == 10);
  CHECK(allocate(999, exponent(1, 3), Scheme::Independent).n == 9);
  CHECK(allocate(1000000, exponent(2, 3), Scheme::Conditional).n == 10000);
  CHECK(allocate(999999, exponent(2, 3), Scheme::Conditional).n == 9999);
  CHECK(allocate(10000, exponent(1, 4), Scheme::Conditional).n == 10);
  CHECK(allocate(3162, exponent(1, 2), Scheme::Conditional).n == 56);
  CHECK(allocate(1000000, exponent_from_double(1.0 / 3.0), Scheme::Conditional).n == 100);
}

TEST_CASE("allocate clamps n to 2 and validates") {
  CHECK(allocate(6, exponent(1, 4), Scheme::Conditional).n == 2);
  CHECK(allocate(6, exponent(1, 4), Scheme::Conditional).m == 2);
  CHECK_THROWS_AS(allocate(5, exponent(1, 2), Scheme::Conditional), ConfigError);
  CHECK_THROWS_AS(allocate(100, FixedN{1}, Scheme::Conditional), ConfigError);
  CHECK_THROWS_AS(allocate(100, FixedN{60}, Scheme::Conditional), ConfigError);
  CHECK_THROWS_AS(allocate(100, FixedN{100}, Scheme::Independent), ConfigError);
  CHECK(allocate(100, FixedN{99}, Scheme::Independent).m == 1);
  CHECK(allocate(100, FixedN{50}, Scheme::Conditional).m == 1);
  CHECK_THROWS_AS(exponent(1, 1), ConfigError);
  CHECK_THROWS_AS(exponent_from_double(0.0), ConfigError);
}

TEST_CASE("budget identity and maximality hold over a sweep") {
  for (const auto& s : {exponent(1, 4), exponent(1, 3), exponent(1, 2), exponent(2, 3)}) {
    std::int64_t prev_n = 0;
    for (std::int64_t T = 6; T <= 200000; T += (T < 2000 ? 1 : 997)) {
      CAPTURE(T);
      Allocation c;
      try {
        c = allocate(T, s, Scheme::Conditional);
      } catch (const ConfigError&) {
        continue;
      }
      CHECK(c.n >= 2);
      CHECK(c.m >= 1);
      CHECK(c.n * c.m + c.n + c.leftover == T);
      CHECK(c.leftover >= 0);
      CHECK(c.leftover < c.n);
      CHECK(c.n * (c.m + 2) > T);
      CHECK(c.n >= prev_n);
      prev_n = c.n;
      // floor(T^alpha) checked against floating point with a wide margin.
      const double p = std::pow(static_cast<double>(T), s.alpha);
      if (std::abs(p - std::round(p)) > 1e-6)
        CHECK(c.n == std::max<std::int64_t>(2, static_cast<std::int64_t>(std::floor(p))));
      const auto i = allocate(T, s, Scheme::Independent);
      CHECK(i.n + i.m == T);
      CHECK(i.n == c.n);
    }
  }
}

TEST_CASE("strategy parsing and labels") {
  CHECK(strategy_label(parse_strategy("1/2")) == "alpha=1/2");
  CHECK(strategy_label(parse_strategy("0.5")) == "alpha=1/2");
  CHECK(strategy_label(parse_strategy("alpha=2/3")) == "alpha=2/3");
  CHECK(strategy_label(parse_strategy("n=100")) == "n=100");
  CHECK(strategy_label(parse_strategy("0.37")) == "alpha=0.37");
  CHECK_THROWS_AS(parse_strategy("x"), ConfigError);
  CHECK_THROWS_AS(parse_strategy("1/"), ConfigError);
  CHECK_THROWS_AS(parse_strategy("n=abc"), ConfigError);
  CHECK_THROWS_AS(parse_strategy("1.5"), ConfigError);
}

TEST_CASE("sample_conditional shapes and determinism") {
  auto p = build(RobustLogisticSpec{10, 1.0, 10.0, unit_ones(10)});
  auto a = sample_conditional(*p, 2, 3, 42);
  CHECK(a.outer.cols() == 2);
  CHECK(a.outer.rows() == 11);
  CHECK(a.inner.cols() == 6);
  CHECK(a.inner.rows() == 10);
  auto b = sample_conditional(*p, 2, 3, 42);
  CHECK(a.outer == b.outer);
  CHECK(a.inner == b.inner);
  auto c = sample_conditional(*p, 2, 3, 43);
  CHECK(a.outer != c.outer);
  CHECK_THROWS_AS(sample_conditional(*p, 0, 3, 1), ConfigError);
  CHECK_THROWS_AS(sample_conditional(*p, 2, 0, 1), ConfigError);
}

TEST_CASE("sample_independent shapes and scheme mismatch") {
  auto p = build(IndependentLogisticSpec{10, 1.0, 10.0, unit_ones(10)});
  auto a = sample_independent(*p, 3, 2, 5);
  CHECK(a.outer.cols() == 3);
  CHECK(a.inner.cols() == 2);
  auto b = sample_independent(*p, 3, 2, 5);
  CHECK(a.inner == b.inner);
  CHECK(a.outer == b.outer);
  auto one = sample_independent(*p, 1, 1, 5);
  CHECK(one.outer.cols() == 1);
  CHECK(one.inner.cols() == 1);
  auto robust = build(RobustLogisticSpec{10, 1.0, 10.0, unit_ones(10)});
  CHECK_THROWS_AS(sample_independent(*robust, 3, 2, 5), ConfigError);
  CHECK_THROWS_AS(sample(*robust, Scheme::Independent, 3, 2, 5), ConfigError);
  auto ds = sample(*p, Scheme::Independent, 4, 7, 1);
  CHECK(scheme_of(ds) == Scheme::Independent);
  CHECK(outer_count(ds) == 4);
  CHECK(inner_count(ds) == 7);
  auto dc = sample(*p, Scheme::Conditional, 4, 7, 1);
  CHECK(scheme_of(dc) == Scheme::Conditional);
  CHECK(inner_count(dc) == 7);
}

TEST_CASE("LAV labels follow a' x_star and inner rows centre on a") {
  const Vector xs = unit_ones(20);
  auto p = build(LavRegressionSpec{20, 1.0, 0.0, xs, NoSmoothing{}});
  auto ds = sample_conditional(*p, 10, 2, 3);
  for (int i = 0; i < 10; ++i)
    CHECK(ds.outer(20, i) == doctest::Approx(ds.outer.col(i).head(20).dot(xs)).epsilon(1e-14));
}

TEST_CASE("empirical conditional means concentrate at the Gaussian rate") {
  const int d = 10;
  const double s2 = 4.0;
  auto p = build(RobustLogisticSpec{d, 1.0, s2, unit_ones(d)});
  for (std::int64_t m : {1, 10, 100}) {
    const std::int64_t n = 2000;
    auto ds = sample_conditional(*p, n, m, 1000 + static_cast<std::uint64_t>(m));
    double mean = 0.0, sq = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
      const Vector avg = ds.inner.middleCols(i * m, m).rowwise().mean();
      const double e = (avg - ds.outer.col(i).head(d)).norm();
      mean += e;
      sq += e * e;
    }
    mean /= n;
    // |z|_2 for z ~ N(0, I_10) has mean sqrt(2) Gamma(11/2) / Gamma(5).
    const double ez = std::sqrt(2.0) * std::tgamma(5.5) / std::tgamma(5.0);
    const double predicted = std::sqrt(s2 / m) * ez;
    const double sigma_g = std::sqrt(s2);
    CHECK(std::abs(mean - predicted) <= 3.0 * sigma_g / std::sqrt(double(m)) / std::sqrt(double(n)));
    // Second moment is exactly d s2 / m.
    CHECK(sq / n == doctest::Approx(d * s2 / m).epsilon(0.05));
  }
}

TEST_CASE("seed derivation") {
  CHECK(derive_seed(1, "a", 0) == derive_seed(1, "a", 0));
  CHECK(derive_seed(1, "a", 0) != derive_seed(1, "a", 1));
  CHECK(derive_seed(1, "a", 0) != derive_seed(2, "a", 0));
  CHECK(derive_seed(1, "a", 0) != derive_seed(1, "b", 0));
  // FNV-1a reference values.
  CHECK(hash_string("") == 0xcbf29ce484222325ULL);
  CHECK(hash_string("a") == 0xaf63dc4c8601ec8cULL);
  // First splitmix64 output from state 0.
  CHECK(mix64(0) == 0xe220a8397b1dcdafULL);
}

}
