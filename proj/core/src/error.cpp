#include "relaxstab/error.hpp"

namespace relaxstab {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::argument: return "argument";
    case ErrorKind::evaluation: return "evaluation";
    case ErrorKind::model: return "model";
    case ErrorKind::numeric: return "numeric";
    case ErrorKind::convergence: return "convergence";
    case ErrorKind::center_spectrum: return "center-spectrum";
    case ErrorKind::turning_point: return "turning-point";
    case ErrorKind::conditioning: return "conditioning";
    case ErrorKind::stability: return "stability";
    case ErrorKind::geometric: return "geometric-regularity";
    case ErrorKind::window: return "window";
    case ErrorKind::step: return "step";
    case ErrorKind::instability: return "instability";
    case ErrorKind::usage: return "usage";
    case ErrorKind::compatibility: return "compatibility";
  }
  return "unknown";
}

void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, std::string(to_string(kind)) + " error: " + message);
}

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::argument:
    case ErrorKind::usage:
    case ErrorKind::compatibility:
      return exit_code::usage;
    default:
      return exit_code::numeric;
  }
}

}  // namespace relaxstab
