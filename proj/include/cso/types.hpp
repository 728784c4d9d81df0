#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace cso {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using ConstVectorRef = Eigen::Ref<const Eigen::VectorXd>;
using ConstMatrixRef = Eigen::Ref<const Eigen::MatrixXd>;
using VectorRef = Eigen::Ref<Eigen::VectorXd>;
using MatrixRef = Eigen::Ref<Eigen::MatrixXd>;

// Invalid input: bad instance parameters, malformed configs, violated
// preconditions. The CLI maps these to exit code 1.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Failure while computing: non-finite objective, I/O, oracle failure.
class RuntimeFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Scheme { Conditional, Independent };

inline const char* to_string(Scheme s) {
  return s == Scheme::Conditional ? "conditional" : "independent";
}

}  // namespace cso
