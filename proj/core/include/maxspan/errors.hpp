#pragma once

#include <stdexcept>
#include <string>

namespace maxspan {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidSpec : Error {
  using Error::Error;
};
struct ParseError : Error {
  using Error::Error;
};
struct ValidationError : Error {
  using Error::Error;
};
struct EmptyGraph : Error {
  using Error::Error;
};
struct ConnectivityFailure : Error {
  using Error::Error;
};
struct NotStronglyConnected : Error {
  using Error::Error;
};
struct NoConvergence : Error {
  using Error::Error;
};
struct CardinalityMismatch : Error {
  using Error::Error;
};
struct InvalidCount : Error {
  using Error::Error;
};
struct TooFewAdversaries : Error {
  using Error::Error;
};
struct InsufficientData : Error {
  using Error::Error;
};
struct LengthMismatch : Error {
  using Error::Error;
};
struct NonPositiveBaseline : Error {
  using Error::Error;
};
struct FingerprintMismatch : Error {
  using Error::Error;
};

}  // namespace maxspan
