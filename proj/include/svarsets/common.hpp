#pragma once

// Shared aliases and the error taxonomy used across the library.
//
// Two error families matter to callers: configuration problems (bad
// restriction sets, malformed inputs) and numerical failures (singular
// regressor matrices, rank-deficient covariances).  The CLI maps them to
// distinct exit codes, so they stay distinct types here.

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace svarsets {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid user-facing input: restriction sets, configs, data files.
struct config_error : error {
  using error::error;
};

// A computation that cannot proceed on this sample (rank loss, failed
// factorization, degenerate covariance).
struct numeric_error : error {
  using error::error;
};

inline constexpr double pi = 3.14159265358979323846;

}  // namespace svarsets
