#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace relaxstab {

/// Failure categories raised by the library. Each maps onto one CLI exit code.
enum class ErrorKind {
  argument,         // precondition on inputs violated
  evaluation,       // system evaluator returned non-finite data
  model,            // system/profile incompatible with the requested operation
  numeric,          // eigensolver or linear solver failure
  convergence,      // iteration budget exhausted
  center_spectrum,  // limiting matrix has spectrum on (or near) the imaginary axis
  turning_point,    // subspace frames degenerate
  conditioning,     // frame or eigenvector matrix too ill-conditioned
  stability,        // block expected to be stable is not
  geometric,        // diagonalization breaks down near coalescence
  window,           // propagator window overflowed
  step,             // CFL violation
  instability,      // simulation blew up
  usage,            // bad configuration / command line
  compatibility,    // incompatible report versions
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) fail(kind, message);
}

/// Exit-code contract of the command-line front end.
namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int usage = 2;
inline constexpr int numeric = 3;
inline constexpr int refuted = 4;
}  // namespace exit_code

int exit_code_for(ErrorKind kind) noexcept;

}  // namespace relaxstab
