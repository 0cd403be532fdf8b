#include "ctcbert/error.hpp"

namespace ctcbert {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Infeasible: return "infeasible";
    case ErrorKind::TooLarge: return "too-large";
    case ErrorKind::DimensionMismatch: return "dimension-mismatch";
    case ErrorKind::LengthMismatch: return "length-mismatch";
    case ErrorKind::ShapeMismatch: return "shape-mismatch";
    case ErrorKind::ConfigInvalid: return "config";
    case ErrorKind::NonFiniteLoss: return "non-finite-loss";
    case ErrorKind::EmptyDataset: return "empty-dataset";
    case ErrorKind::DivisionByZero: return "division-by-zero";
    case ErrorKind::Io: return "io";
    case ErrorKind::VersionMismatch: return "version-mismatch";
  }
  return "unknown";
}

}  // namespace ctcbert
