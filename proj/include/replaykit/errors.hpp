#pragma once

#include <stdexcept>

namespace replaykit {

// Base type for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed or unreadable input data (dataset files, generation failures).
struct DataError : Error {
  using Error::Error;
};

// Invalid configuration, arguments, or precondition violations.
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace replaykit
