#include "cso/sampling.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

namespace cso {

namespace {

// b^e, or -1 when it does not fit in 127 bits.
__int128 checked_pow(std::int64_t b, int e) {
  const __int128 limit = (static_cast<__int128>(1) << 125);
  __int128 r = 1;
  for (int i = 0; i < e; ++i) {
    if (b != 0 && r > limit / b) return -1;
    r *= b;
  }
  return r;
}

std::int64_t floor_power(std::int64_t T, const StrategyExponent& s) {
  const long double approx = std::pow(static_cast<long double>(T), static_cast<long double>(s.alpha));
  auto c = static_cast<std::int64_t>(std::floor(approx));
  if (s.den <= 0) return c;
  const __int128 rhs = checked_pow(T, s.num);
  if (rhs < 0) return c;
  // Correct a possible off-by-one of the floating-point estimate.
  auto le = [&](std::int64_t v) {
    const __int128 p = checked_pow(v, s.den);
    return p >= 0 && p <= rhs;
  };
  while (c > 0 && !le(c)) --c;
  while (le(c + 1)) ++c;
  return c;
}

}  // namespace

StrategyExponent exponent(int num, int den) {
  if (den <= 0 || num <= 0 || num >= den)
    throw ConfigError("strategy exponent must lie in (0, 1)");
  return {static_cast<double>(num) / den, num, den};
}

StrategyExponent exponent_from_double(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("strategy exponent must lie in (0, 1)");
  for (int den = 1; den <= 24; ++den) {
    const double num = std::round(alpha * den);
    if (num >= 1 && std::abs(num / den - alpha) <= 1e-12) return exponent(static_cast<int>(num), den);
  }
  return {alpha, 0, 0};
}

Strategy parse_strategy(const std::string& text) {
  std::string s = text;
  if (s.rfind("alpha=", 0) == 0) s = s.substr(6);
  if (s.rfind("n=", 0) == 0) {
    char* end = nullptr;
    const long long n = std::strtoll(s.c_str() + 2, &end, 10);
    if (end == s.c_str() + 2 || *end != '\0') throw ConfigError("bad strategy: " + text);
    return FixedN{n};
  }
  const auto slash = s.find('/');
  char* end = nullptr;
  if (slash != std::string::npos) {
    const std::string a = s.substr(0, slash), b = s.substr(slash + 1);
    const long num = std::strtol(a.c_str(), &end, 10);
    if (a.empty() || *end != '\0') throw ConfigError("bad strategy: " + text);
    const long den = std::strtol(b.c_str(), &end, 10);
    if (b.empty() || *end != '\0') throw ConfigError("bad strategy: " + text);
    return exponent(static_cast<int>(num), static_cast<int>(den));
  }
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0') throw ConfigError("bad strategy: " + text);
  return exponent_from_double(v);
}

std::string strategy_label(const Strategy& s) {
  if (const auto* f = std::get_if<FixedN>(&s)) return "n=" + std::to_string(f->n);
  const auto& e = std::get<StrategyExponent>(s);
  if (e.den > 0) return "alpha=" + std::to_string(e.num) + "/" + std::to_string(e.den);
  char buf[64];
  std::snprintf(buf, sizeof buf, "alpha=%.17g", e.alpha);
  return buf;
}

Allocation allocate(std::int64_t T, const Strategy& strategy, Scheme scheme) {
  if (T < 6) throw ConfigError("allocate: budget must be >= 6");
  Allocation a;
  a.T = T;
  a.scheme = scheme;
  a.strategy = strategy;
  if (const auto* f = std::get_if<FixedN>(&strategy)) {
    if (f->n < 2) throw ConfigError("allocate: fixed n must be >= 2");
    a.n = f->n;
  } else {
    const auto& e = std::get<StrategyExponent>(strategy);
    if (!(e.alpha > 0.0 && e.alpha < 1.0)) throw ConfigError("allocate: exponent must lie in (0, 1)");
    a.n = std::max<std::int64_t>(2, floor_power(T, e));
  }
  if (scheme == Scheme::Conditional) {
    a.m = (T - a.n) / a.n;
    a.leftover = T - a.n * (a.m + 1);
  } else {
    a.m = T - a.n;
    a.leftover = 0;
  }
  if (a.m < 1)
    throw ConfigError("allocate: budget " + std::to_string(T) + " too small for n = " +
                      std::to_string(a.n));
  return a;
}

ConditionalDataset sample_conditional(const CsoProblem& problem, std::int64_t n, std::int64_t m,
                                      std::uint64_t seed) {
  if (n < 1 || m < 1) throw ConfigError("sample_conditional: n and m must be >= 1");
  ConditionalDataset ds;
  ds.n = n;
  ds.m = m;
  ds.outer.resize(problem.xi_dimension(), n);
  ds.inner.resize(problem.eta_dimension(), n * m);
  Rng rng(seed);
  for (std::int64_t i = 0; i < n; ++i) {
    problem.sample_outer(rng, ds.outer.col(i));
    for (std::int64_t j = 0; j < m; ++j)
      problem.sample_inner(ds.outer.col(i), rng, ds.inner.col(i * m + j));
  }
  return ds;
}

IndependentDataset sample_independent(const CsoProblem& problem, std::int64_t n, std::int64_t m,
                                      std::uint64_t seed) {
  if (n < 1 || m < 1) throw ConfigError("sample_independent: n and m must be >= 1");
  if (!problem.independent_inner())
    throw ConfigError(problem.name() + ": inner samples depend on xi; independent sampling is invalid");
  IndependentDataset ds;
  ds.n = n;
  ds.m = m;
  ds.outer.resize(problem.xi_dimension(), n);
  ds.inner.resize(problem.eta_dimension(), m);
  Rng rng(seed);
  for (std::int64_t i = 0; i < n; ++i) problem.sample_outer(rng, ds.outer.col(i));
  const Vector none = Vector::Zero(problem.xi_dimension());
  for (std::int64_t j = 0; j < m; ++j) problem.sample_inner(none, rng, ds.inner.col(j));
  return ds;
}

Dataset sample(const CsoProblem& problem, Scheme scheme, std::int64_t n, std::int64_t m,
               std::uint64_t seed) {
  if (scheme == Scheme::Conditional) return sample_conditional(problem, n, m, seed);
  return sample_independent(problem, n, m, seed);
}

std::int64_t outer_count(const Dataset& ds) {
  return std::visit([](const auto& d) { return d.n; }, ds);
}
std::int64_t inner_count(const Dataset& ds) {
  return std::visit([](const auto& d) { return d.m; }, ds);
}
Scheme scheme_of(const Dataset& ds) {
  return std::holds_alternative<ConditionalDataset>(ds) ? Scheme::Conditional : Scheme::Independent;
}

}  // namespace cso
