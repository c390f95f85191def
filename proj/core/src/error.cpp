#include "porehom/error.hpp"

namespace porehom {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Geometry: return "geometry";
    case ErrorKind::Meshing: return "meshing";
    case ErrorKind::Tiling: return "tiling";
    case ErrorKind::Conformity: return "conformity";
    case ErrorKind::Solver: return "solver";
    case ErrorKind::Numerical: return "numerical";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Io: return "io";
    case ErrorKind::Usage: return "usage";
  }
  return "unknown";
}

}  // namespace porehom
