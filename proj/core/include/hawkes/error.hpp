#pragma once

#include <stdexcept>
#include <string>

namespace hawkes {

/// Coarse classification of failures. Each kind maps to a distinct process
/// exit code in the command-line tool.
enum class ErrorKind {
  Domain,          // parameter outside its admissible range
  DivergentNorm,   // kernel with infinite L1 norm
  Instability,     // spectral radius >= 1 where stationarity is required
  NonConvergence,  // iterative method did not converge
  Singular,        // singular or ill-conditioned linear system
  Coverage,        // conditional law does not cover a required lag
  EmptyComponent,  // a component without events where events are required
  Pairing,         // invalid component involution
  Format,          // malformed file or record
  Io,              // filesystem failure
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) fail(kind, what);
}

}  // namespace hawkes
