#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>

#include "cso/problem.hpp"

namespace cso {

// n = max(2, floor(T^alpha)). When alpha is a small rational num/den the floor
// is computed exactly with integer arithmetic (so floor(1000^(1/3)) == 10).
struct StrategyExponent {
  double alpha = 0.5;
  int num = 0;  // 0 when alpha has no small rational form
  int den = 0;
};
struct FixedN {
  std::int64_t n = 2;
};
using Strategy = std::variant<StrategyExponent, FixedN>;

StrategyExponent exponent(int num, int den);
// Recovers a small rational (denominator <= 24) when alpha is within 1e-12 of one.
StrategyExponent exponent_from_double(double alpha);
// Accepts "1/2", "0.5", "alpha=1/2", "n=100".
Strategy parse_strategy(const std::string& text);
// "alpha=1/2", "alpha=0.37", "n=100".
std::string strategy_label(const Strategy& s);

struct Allocation {
  std::int64_t T = 0;
  Scheme scheme = Scheme::Conditional;
  Strategy strategy;
  std::int64_t n = 0;
  std::int64_t m = 0;
  std::int64_t leftover = 0;
};

// Conditional: m = floor((T - n) / n), leftover = T - n (m + 1).
// Independent: m = T - n.
Allocation allocate(std::int64_t T, const Strategy& strategy, Scheme scheme);

// Columns are samples. Inner row i occupies columns [i m, (i + 1) m).
struct ConditionalDataset {
  std::int64_t n = 0;
  std::int64_t m = 0;
  Matrix outer;  // xi_dimension x n
  Matrix inner;  // eta_dimension x (n m)
};

struct IndependentDataset {
  std::int64_t n = 0;
  std::int64_t m = 0;
  Matrix outer;  // xi_dimension x n
  Matrix inner;  // eta_dimension x m, shared by every outer sample
};

using Dataset = std::variant<ConditionalDataset, IndependentDataset>;

// Draw order: xi_1, its m inner samples, xi_2, ...
ConditionalDataset sample_conditional(const CsoProblem& problem, std::int64_t n, std::int64_t m,
                                      std::uint64_t seed);
// Draw order: all xi, then the shared inner list.
IndependentDataset sample_independent(const CsoProblem& problem, std::int64_t n, std::int64_t m,
                                      std::uint64_t seed);

Dataset sample(const CsoProblem& problem, Scheme scheme, std::int64_t n, std::int64_t m,
               std::uint64_t seed);

std::int64_t outer_count(const Dataset& ds);
std::int64_t inner_count(const Dataset& ds);
Scheme scheme_of(const Dataset& ds);

}  // namespace cso
