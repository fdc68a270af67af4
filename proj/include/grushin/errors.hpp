#pragma once

#include <stdexcept>
#include <string>

namespace grushin {

/// Broad classes of failure. The CLI maps each to an exit status.
enum class ErrorKind {
  invalid_argument,  // precondition violated by the caller
  invariant,         // a hard mathematical invariant failed (H <= 0, N <= -1, ...)
  config,            // configuration text rejected
  convergence,       // iteration cap or refinement check failed
  io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorKind::invalid_argument, what);
}

}  // namespace grushin
