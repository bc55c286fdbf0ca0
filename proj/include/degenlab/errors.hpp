// SPDX-License-Identifier: Apache-2.0

#ifndef DEGENLAB_ERRORS_HPP
#define DEGENLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace degenlab {

/// A boundary condition description violates the shape rules
/// (order outside {0,1}, coefficient list of the wrong length,
/// vanishing top coefficients).
class InvalidBoundaryCondition : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// The problem data failed validation with error severity
/// (sign condition, degenerate eta determinant, shape mismatch).
class ConditionViolation : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// The eta determinant of a boundary-condition pair is below the
/// degeneracy tolerance; the two-point problem is not regular.
class EtaDegenerate : public ConditionViolation {
public:
  using ConditionViolation::ConditionViolation;
};

/// Sparse factorization failed or the computed solution does not
/// satisfy the residual contract; lambda sits on (or numerically
/// near) the discrete spectrum, or the constraints degenerate.
class SingularSystem : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A user callback threw or produced non-finite values.
class CallbackFailure : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A ratio was requested against an identically zero denominator.
class DivisionByZero : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// A run configuration failed schema validation; `key_path` names
/// the offending entry.
class SchemaError : public std::runtime_error {
public:
  SchemaError(std::string key_path, const std::string& what)
      : std::runtime_error(key_path + ": " + what), key_path_(std::move(key_path)) {}
  const std::string& key_path() const noexcept { return key_path_; }

private:
  std::string key_path_;
};

} // namespace degenlab

#endif
