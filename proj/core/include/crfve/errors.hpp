#ifndef CRFVE_ERRORS_HPP_
#define CRFVE_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace crfve {

// Bad argument to a constructor or builder (n < 2, m does not divide n, ...).
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class SingularGeometry : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A direct factorization of a sub-block failed. The message names the block.
class FactorizationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MatrixNotPsd : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InsufficientData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Preconditioner setup could not factorize a subspace matrix.
class SetupFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised by the experiment pipeline; wraps the failing stage name.
class StageFailure : public std::runtime_error {
 public:
  StageFailure(std::string stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace crfve

#endif  // CRFVE_ERRORS_HPP_
