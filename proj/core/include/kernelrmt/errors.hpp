#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kernelrmt {

/// Invalid model, kernel or operation parameter.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Operand shapes do not agree.
class DimensionError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

/// Argument outside the mathematical domain of a function (Im z <= 0, rho > 1, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A kernel produced a non-finite value. Carries the offending entry when known.
class EvaluationError : public std::runtime_error {
 public:
  explicit EvaluationError(const std::string& what) : std::runtime_error(what) {}
  EvaluationError(const std::string& what, std::size_t row, std::size_t col)
      : std::runtime_error(what + " at (" + std::to_string(row) + ", " + std::to_string(col) + ")"),
        row_(row),
        col_(col),
        has_entry_(true) {}

  bool has_entry() const noexcept { return has_entry_; }
  std::size_t row() const noexcept { return row_; }
  std::size_t col() const noexcept { return col_; }

 private:
  std::size_t row_ = 0;
  std::size_t col_ = 0;
  bool has_entry_ = false;
};

/// Iterative method failed to converge or a numerical contract was violated.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Eigenvalue is not separated from its neighbours.
class GapError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Malformed or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace kernelrmt
