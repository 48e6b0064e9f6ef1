#pragma once

#include <stdexcept>
#include <string>

namespace bnn {

/// A point fell outside the domain of a field or map.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An operation's documented precondition does not hold for its input.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Two vectors expected to span a plane (or one expected nonzero) do not.
class DegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Beltrami coefficient with sup |nu| >= 1.
class EllipticityError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// Failure inside the normalization pipeline; `stage()` names the step.
class PipelineError : public std::runtime_error {
 public:
  PipelineError(std::string stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

}  // namespace bnn
