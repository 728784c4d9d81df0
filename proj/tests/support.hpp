#pragma once

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <memory>
#include <string>

#include "cso/problem.hpp"
#include "cso/sampling.hpp"

namespace cso::test {

// f(u) = u^2, g = x + eta (d = k = 1), eta ~ N(0, sigma^2); no outer noise.
class QuadraticToy final : public CsoProblem {
 public:
  explicit QuadraticToy(double sigma = 1.0, double radius = 100.0)
      : CsoProblem(1, 1, 0, 1, radius), sigma_(sigma) {}
  std::string name() const override { return "QuadraticToy"; }
  bool smooth_outer() const override { return true; }
  bool independent_inner() const override { return true; }
  double outer_value(ConstVectorRef u, ConstVectorRef) const override { return u[0] * u[0]; }
  void outer_gradient(ConstVectorRef u, ConstVectorRef, VectorRef out) const override {
    out[0] = 2.0 * u[0];
  }
  void inner_value(ConstVectorRef x, ConstVectorRef, ConstVectorRef eta, VectorRef out) const override {
    out[0] = x[0] + eta[0];
  }
  void inner_jacobian(ConstVectorRef, ConstVectorRef, ConstVectorRef, MatrixRef out) const override {
    out(0, 0) = 1.0;
  }
  void sample_outer(Rng&, VectorRef) const override {}
  void sample_inner(ConstVectorRef, Rng& rng, VectorRef eta) const override {
    eta[0] = sigma_ * rng.gaussian();
  }

 private:
  double sigma_;
};

// xi = (a, b) with a ~ N(0, I_d), b = a' w + noise; f(u) = u^2, g = a' x - b.
// The SAA objective is (1/n) |A x - b|^2, minimized in closed form.
// The inner map ignores eta; eta_dimension is 1 so datasets are well formed.
class LeastSquaresToy final : public CsoProblem {
 public:
  LeastSquaresToy(int d, double radius) : CsoProblem(d, 1, d + 1, 1, radius) {}
  std::string name() const override { return "LeastSquaresToy"; }
  bool smooth_outer() const override { return true; }
  bool independent_inner() const override { return true; }
  double outer_value(ConstVectorRef u, ConstVectorRef) const override { return u[0] * u[0]; }
  void outer_gradient(ConstVectorRef u, ConstVectorRef, VectorRef out) const override {
    out[0] = 2.0 * u[0];
  }
  void inner_value(ConstVectorRef x, ConstVectorRef xi, ConstVectorRef, VectorRef out) const override {
    out[0] = xi.head(dimension()).dot(x) - xi[dimension()];
  }
  void inner_jacobian(ConstVectorRef, ConstVectorRef xi, ConstVectorRef, MatrixRef out) const override {
    out.row(0) = xi.head(dimension()).transpose();
  }
  void sample_outer(Rng& rng, VectorRef xi) const override {
    double b = 0.0;
    for (int j = 0; j < dimension(); ++j) {
      xi[j] = rng.gaussian();
      b += xi[j] * (j + 1) * 0.1;
    }
    xi[dimension()] = b + 0.5 * rng.gaussian();
  }
  void sample_inner(ConstVectorRef, Rng&, VectorRef eta) const override { eta[0] = 0.0; }
};

// Returns NaN once |x| exceeds a threshold, to exercise solver diagnostics.
class NanToy final : public CsoProblem {
 public:
  NanToy() : CsoProblem(1, 1, 0, 1, 100.0) {}
  std::string name() const override { return "NanToy"; }
  bool smooth_outer() const override { return true; }
  bool independent_inner() const override { return true; }
  double outer_value(ConstVectorRef u, ConstVectorRef) const override {
    return std::abs(u[0]) > 2.0 ? std::nan("") : -u[0];
  }
  void outer_gradient(ConstVectorRef, ConstVectorRef, VectorRef out) const override { out[0] = -1.0; }
  void inner_value(ConstVectorRef x, ConstVectorRef, ConstVectorRef, VectorRef out) const override {
    out[0] = x[0];
  }
  void inner_jacobian(ConstVectorRef, ConstVectorRef, ConstVectorRef, MatrixRef out) const override {
    out(0, 0) = 1.0;
  }
  void sample_outer(Rng&, VectorRef) const override {}
  void sample_inner(ConstVectorRef, Rng&, VectorRef eta) const override { eta[0] = 0.0; }
};

inline std::filesystem::path temp_dir(const std::string& name) {
  const char* base = std::getenv("CSO_TEST_TMP");
  std::filesystem::path p = base ? std::filesystem::path(base) : std::filesystem::temp_directory_path() / "cso_tests";
  p /= name;
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

// Independent dataset with the shared inner list given explicitly (eta dimension 1).
inline std::shared_ptr<const Dataset> independent_1d(const std::vector<double>& etas, std::int64_t n = 1) {
  IndependentDataset ds;
  ds.n = n;
  ds.m = static_cast<std::int64_t>(etas.size());
  ds.outer.resize(0, n);
  ds.inner.resize(1, ds.m);
  for (std::size_t j = 0; j < etas.size(); ++j) ds.inner(0, static_cast<Eigen::Index>(j)) = etas[j];
  return std::make_shared<const Dataset>(ds);
}

}  // namespace cso::test
