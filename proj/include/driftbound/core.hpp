#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace driftbound {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using ConstVecRef = Eigen::Ref<const Vector>;
using VecRef = Eigen::Ref<Vector>;

// Error hierarchy. The CLI maps ConfigError to exit status 2 and
// NumericalError to exit status 3; everything else is a caller bug.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inputs violate a documented precondition (bad dimension, bad parameter).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The requested capability does not exist for this model.
class Unsupported : public Error {
 public:
  using Error::Error;
};

/// A simulation or solver failed at run time (divergence, non-convergence,
/// violated thinning envelope, zero acceptance).
class NumericalError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

void require(bool condition, const std::string& message);
void require_dim(std::size_t expected, Eigen::Index actual, const char* what);
void require_finite(ConstVecRef x, const char* what);

inline bool all_finite(ConstVecRef x) { return x.allFinite(); }

}  // namespace driftbound
