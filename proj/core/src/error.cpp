#include "hawkes/error.hpp"

namespace hawkes {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Domain: return "domain";
    case ErrorKind::DivergentNorm: return "divergent-norm";
    case ErrorKind::Instability: return "instability";
    case ErrorKind::NonConvergence: return "non-convergence";
    case ErrorKind::Singular: return "singular";
    case ErrorKind::Coverage: return "coverage";
    case ErrorKind::EmptyComponent: return "empty-component";
    case ErrorKind::Pairing: return "pairing";
    case ErrorKind::Format: return "format";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace hawkes
