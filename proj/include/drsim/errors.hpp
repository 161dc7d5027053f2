#pragma once

#include <stdexcept>

namespace drsim {

// Input data (CSV rows, config files, histories) that cannot be used.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An iterative numeric routine failed to converge or left its domain.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A requested computation exceeds the configured capacity (e.g. the exact
// solver's state table would not fit the memory budget).
struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace drsim
