#pragma once

#include <stdexcept>

namespace absa {

// Error taxonomy shared across the library. Every failure a caller can
// reasonably react to gets its own type; all derive from Error so the CLI
// maps them to exit codes in one place.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ShapeError : Error { using Error::Error; };      // dimension mismatch
struct ContractError : Error { using Error::Error; };   // precondition violated
struct StateError : Error { using Error::Error; };      // call sequence violated
struct FormatError : Error { using Error::Error; };     // malformed input file
struct ConfigError : Error { using Error::Error; };     // invalid run configuration
struct LookupError : Error { using Error::Error; };     // missing vocabulary entry
struct TagError : Error { using Error::Error; };        // unknown POS tag
struct SpanError : Error { using Error::Error; };       // invalid token span
struct AlignmentError : Error { using Error::Error; };  // per-token channels disagree
struct EncodeError : Error { using Error::Error; };     // overlapping spans
struct ValidityError : Error { using Error::Error; };   // invalid IOB2 sequence
struct EvalError : Error { using Error::Error; };       // evaluation coverage mismatch
struct NumericError : Error { using Error::Error; };    // NaN or Inf detected
struct IoError : Error { using Error::Error; };         // filesystem failure

}  // namespace absa
