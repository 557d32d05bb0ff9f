#include "star/error.hpp"

namespace star {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidSize: return "invalid-size";
    case ErrorKind::InvalidParams: return "invalid-params";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Collision: return "collision";
    case ErrorKind::Causality: return "causality";
    case ErrorKind::DuplicateIndex: return "duplicate-index";
    case ErrorKind::MissingIndex: return "missing-index";
    case ErrorKind::UnknownDatum: return "unknown-datum";
    case ErrorKind::Infeasible: return "infeasible";
    case ErrorKind::TooLarge: return "too-large";
    case ErrorKind::Internal: return "internal";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

}  // namespace star
