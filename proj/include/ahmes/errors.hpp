#pragma once

#include <stdexcept>
#include <string>

namespace ahmes {

// Base for everything thrown by this library on a certified-computation
// failure. Precondition violations (caller bugs) use std::invalid_argument
// instead, so callers can tell "you misused the API" from "the computation
// could not be certified".
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// The refinement budget ran out before the requested width was reached.
struct PrecisionCapExceeded : Error {
  using Error::Error;
};

// Sign-variation counting could not certify the root pattern the caller
// asked for (e.g. "unique positive root" on a polynomial with several).
struct IsolationFailed : Error {
  using Error::Error;
};

struct DivisionByIntervalContainingZero : Error {
  using Error::Error;
};

// ln of an interval touching (-inf, 0].
struct NonPositiveArgument : Error {
  using Error::Error;
};

// floor(base^t) could not be pinned to one integer within budget; only
// raised when the exponent enclosure refuses to narrow far enough.
struct FloorUndecidable : Error {
  using Error::Error;
};

// Access past the materialized horizon of a finite sequence.
struct IndexBeyondHorizon : Error {
  using Error::Error;
};

// The sequence kind cannot supply a certified tail-ratio bound.
struct NoCertificate : Error {
  using Error::Error;
};

// Target sits within enclosure slack of two adjacent candidate brackets and
// the budget ran out before the membership decision became certified.
struct SelectionUndecidable : Error {
  using Error::Error;
};

// No candidate bracket certifiably contains the target (covering failure).
struct CoverageViolated : Error {
  using Error::Error;
};

struct TargetOutsideRange : Error {
  using Error::Error;
};

struct MalformedCertificate : Error {
  using Error::Error;
};

}  // namespace ahmes
