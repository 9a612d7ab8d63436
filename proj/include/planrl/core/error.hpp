#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace planrl {

enum class ErrorKind {
  Validation,       // malformed domain object; message names the violated invariant
  Usage,            // caller broke a documented precondition
  Numeric,          // non-finite value where a finite one is required
  Serialization,    // broken rollout/token stream
  Template,         // prompt template slot problems
  JudgeUnavailable, // judge retries exhausted
  Contract,         // internal contract violation
  Io,
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace planrl
