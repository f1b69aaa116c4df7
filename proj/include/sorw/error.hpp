#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace sorw {

// Input could not be parsed. Carries the 1-based line number when known.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

  // Same error with `prefix` (e.g. a file name) in front of the message.
  ParseError with_prefix(const std::string& prefix) const {
    ParseError e(prefix + what());
    e.line_ = line_;
    return e;
  }

 private:
  std::size_t line_;
};

// A graph or chain does not satisfy the precondition of an operation
// (zero out-degree, dangling edges, malformed transition tensor, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when an operation needs a unique stationary density but the
// transition structure is not strongly connected.
class ReducibleChainError : public std::runtime_error {
 public:
  ReducibleChainError(const std::string& what, std::vector<std::vector<std::size_t>> components)
      : std::runtime_error(what), components_(std::move(components)) {}
  const std::vector<std::vector<std::size_t>>& components() const noexcept { return components_; }

 private:
  std::vector<std::vector<std::size_t>> components_;
};

// A numerical identity that must hold by construction failed its tolerance.
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Requested computation exceeds a configured size limit.
class ResourceLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sorw
