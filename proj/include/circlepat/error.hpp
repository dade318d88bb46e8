#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace circlepat {

enum class ErrorCode {
  InvalidArgument,
  InvalidAngles,
  MissingEdgeClasses,
  InvalidMesh,
  NonConvergence,
  InconsistentZeroAngle,
  DegenerateLayout,
  DegenerateCrossRatio,
  BranchError,
  EuclideanDegenerate,
  EuclideanPoint,
  SingularLaplacian,
  NotInW,
  UnwrapFailure,
  CheckFailed,
  Io,
};

/// Stable machine-readable name, used by the CLI error output.
inline std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::InvalidAngles: return "INVALID_ANGLES";
    case ErrorCode::MissingEdgeClasses: return "MISSING_EDGE_CLASSES";
    case ErrorCode::InvalidMesh: return "INVALID_MESH";
    case ErrorCode::NonConvergence: return "NON_CONVERGENCE";
    case ErrorCode::InconsistentZeroAngle: return "INCONSISTENT_ZERO_ANGLE";
    case ErrorCode::DegenerateLayout: return "DEGENERATE_LAYOUT";
    case ErrorCode::DegenerateCrossRatio: return "DEGENERATE_CROSS_RATIO";
    case ErrorCode::BranchError: return "BRANCH_ERROR";
    case ErrorCode::EuclideanDegenerate: return "EUCLIDEAN_DEGENERATE";
    case ErrorCode::EuclideanPoint: return "EUCLIDEAN_POINT";
    case ErrorCode::SingularLaplacian: return "SINGULAR_LAPLACIAN";
    case ErrorCode::NotInW: return "NOT_IN_W";
    case ErrorCode::UnwrapFailure: return "UNWRAP_FAILURE";
    case ErrorCode::CheckFailed: return "CHECK_FAILED";
    case ErrorCode::Io: return "IO_ERROR";
  }
  return "UNKNOWN";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace circlepat
