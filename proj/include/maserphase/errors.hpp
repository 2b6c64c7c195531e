#pragma once

#include <stdexcept>
#include <string>

namespace maser {

// All conditions that abort a computation derive from Error so callers can
// catch one type at the CLI boundary and map it to a nonzero exit code.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// expansion cap reached before the stationary tail criterion was met
struct TruncationError : Error {
  using Error::Error;
};

// requested closed form does not exist (geometric ratio >= 1)
struct NormalizabilityError : Error {
  using Error::Error;
};

// parameters outside the region where the requested quantity is defined
struct DomainError : Error {
  using Error::Error;
};

// quadrature failed to reach the requested tolerance within its budget
struct QuadratureError : Error {
  using Error::Error;
};

// theta outside the image of a saddle sub-branch
struct RangeError : Error {
  using Error::Error;
};

// two branch potentials do not intersect inside the overlap of their images
struct NoCrossingError : Error {
  using Error::Error;
};

// similarity transform of the generator is not defined for these parameters
struct SymmetrizationError : Error {
  using Error::Error;
};

// autocovariance tail too short or degenerate for an exponential fit
struct FitError : Error {
  using Error::Error;
};

// command line could not be interpreted; maps to exit code 1
struct UsageError : Error {
  using Error::Error;
};

}  // namespace maser
