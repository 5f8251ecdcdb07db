#include "shrinklab/error.hpp"

namespace shrinklab {

  std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
      case ErrorKind::ClosureExceedsCap: return "ClosureExceedsCap";
      case ErrorKind::NotBijective: return "NotBijective";
      case ErrorKind::OrderExceedsCap: return "OrderExceedsCap";
      case ErrorKind::NotNormal: return "NotNormal";
      case ErrorKind::ContainedInFrattini: return "ContainedInFrattini";
      case ErrorKind::NotSolvable: return "NotSolvable";
      case ErrorKind::NotPGroup: return "NotPGroup";
      case ErrorKind::CapExceeded: return "CapExceeded";
      case ErrorKind::DimensionMismatch: return "DimensionMismatch";
      case ErrorKind::GroupMismatch: return "GroupMismatch";
      case ErrorKind::RangeExceeded: return "RangeExceeded";
      case ErrorKind::ParentMismatch: return "ParentMismatch";
      case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
      case ErrorKind::SurjectivityFailure: return "SurjectivityFailure";
      case ErrorKind::NotSurjective: return "NotSurjective";
      case ErrorKind::NotEquivariant: return "NotEquivariant";
      case ErrorKind::NotFound: return "NotFound";
      case ErrorKind::InternalVerifyFail: return "InternalVerifyFail";
      case ErrorKind::VerifyFail: return "VerifyFail";
      case ErrorKind::StageOrderViolation: return "StageOrderViolation";
      case ErrorKind::ParseError: return "ParseError";
      case ErrorKind::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
  }

}  // namespace shrinklab
