#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace shrinklab {

  enum class ErrorKind {
    ClosureExceedsCap,
    NotBijective,
    OrderExceedsCap,
    NotNormal,
    ContainedInFrattini,
    NotSolvable,
    NotPGroup,
    CapExceeded,
    DimensionMismatch,
    GroupMismatch,
    RangeExceeded,
    ParentMismatch,
    IndexOutOfRange,
    SurjectivityFailure,
    NotSurjective,
    NotEquivariant,
    NotFound,
    InternalVerifyFail,
    VerifyFail,
    StageOrderViolation,
    ParseError,
    InvalidArgument,
  };

  std::string_view to_string(ErrorKind kind) noexcept;

  //! The single exception type thrown by the library; kind() tells callers
  //! which contract was violated.
  class Error : public std::runtime_error {
   public:
    Error(ErrorKind kind, std::string const& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what),
          _kind(kind) {}

    ErrorKind kind() const noexcept {
      return _kind;
    }

   private:
    ErrorKind _kind;
  };

}  // namespace shrinklab

#define SHRINKLAB_THROW(kind, msg) \
  throw ::shrinklab::Error(::shrinklab::ErrorKind::kind, msg)

#define SHRINKLAB_REQUIRE(cond, kind, msg) \
  do {                                     \
    if (!(cond)) {                         \
      SHRINKLAB_THROW(kind, msg);          \
    }                                      \
  } while (false)
