#pragma once

#include <stdexcept>
#include <string>

namespace vfc {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed model or violated builder contract.
struct ModelError : Error {
  using Error::Error;
};

// Input file could not be parsed or failed validation.
struct DataError : Error {
  using Error::Error;
};

// Mismatched shapes between weights, providers, series, or schedules.
struct DimensionError : Error {
  using Error::Error;
};

// Requested feature outside the supported scope (e.g. KKT assembly for
// generators with min up/down time > 1).
struct UnsupportedError : Error {
  using Error::Error;
};

// Numerical failure, or infeasibility where the formulation guarantees
// feasibility (which indicates a bug, not a data problem).
struct SolverFailure : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace vfc
