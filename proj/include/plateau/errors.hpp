#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace plateau {

/// Argument lies outside the closed domain of a function, slice or graph.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A property guaranteed by the construction failed numerically
/// (lost monotonicity, non-positive ruling component, ...). Usually means the
/// smallness parameter was misestimated or tolerances are mismatched.
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A smallness gate (interp / left / right) required by a stage is closed.
class GateError : public std::runtime_error {
 public:
  GateError(std::string gate, const std::string& what)
      : std::runtime_error(what), gate_(std::move(gate)) {}
  const std::string& gate() const noexcept { return gate_; }

 private:
  std::string gate_;
};

/// Domain or datum failed one or more structural checks.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(const std::string& what, std::vector<std::string> failures)
      : std::runtime_error(what), failures_(std::move(failures)) {}
  const std::vector<std::string>& failures() const noexcept { return failures_; }

 private:
  std::vector<std::string> failures_;
};

}  // namespace plateau
