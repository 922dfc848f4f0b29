#pragma once

#include <stdexcept>

namespace emgpr {

// Base type for everything the library throws.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid parameters: bad filter edges, malformed config, unsupported orders.
struct ConfigError : Error {
  using Error::Error;
};

// Frame/vector/matrix size mismatches.
struct DimensionError : Error {
  using Error::Error;
};

// Bad or truncated data: files, short windows, missing trials.
struct DataError : Error {
  using Error::Error;
};

// Classifier construction and extension failures.
struct ModelError : Error {
  using Error::Error;
};

// Session script problems (unknown phase, untrained test label, ...).
struct ScriptError : Error {
  using Error::Error;
};

}  // namespace emgpr
