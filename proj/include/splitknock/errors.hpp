#pragma once

#include <stdexcept>
#include <string>

namespace splitknock {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define SPLITKNOCK_ERROR(Name)                  \
  struct Name : Error {                         \
    explicit Name(const std::string& msg)       \
        : Error(std::string(#Name ": ") + msg) {} \
  }

SPLITKNOCK_ERROR(DimensionMismatch);
SPLITKNOCK_ERROR(InvalidResponseDomain);
SPLITKNOCK_ERROR(MalformedComparisonRow);
SPLITKNOCK_ERROR(NonFiniteInput);
SPLITKNOCK_ERROR(ZeroTransform);
SPLITKNOCK_ERROR(NotPSD);
SPLITKNOCK_ERROR(InfeasibleAlpha);
SPLITKNOCK_ERROR(InvalidS);
SPLITKNOCK_ERROR(CholeskyFailure);
SPLITKNOCK_ERROR(UnknownEdge);
SPLITKNOCK_ERROR(NonFiniteIterate);
SPLITKNOCK_ERROR(EmptyGrid);
SPLITKNOCK_ERROR(EmptyInput);
SPLITKNOCK_ERROR(SingularPrecision);
SPLITKNOCK_ERROR(SingularAfterRidge);
SPLITKNOCK_ERROR(IoError);

#undef SPLITKNOCK_ERROR

}  // namespace splitknock
