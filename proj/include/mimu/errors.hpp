#pragma once

#include <stdexcept>
#include <string>

namespace mimu {

/// Malformed input data, files, or schemas (CLI exit code 2).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure: optimizer divergence, singular composition,
/// excessive rotation dispersion (CLI exit code 3).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mimu
