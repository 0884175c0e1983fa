#pragma once

#include <stdexcept>
#include <string>

namespace toepfit {

// Error taxonomy shared by the library and the CLI. The CLI maps these to
// process exit codes: UsageError -> 2, DataError -> 3, NumericalError -> 4.

// Caller broke an interface contract (bad flag value, wrong vector length).
class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

// Input data is malformed or unusable (missing file, NaN in a series,
// short series, invalid sampling distribution).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// A computation cannot proceed (rank-deficient where full rank is required,
// zero residual norm, nonstationary model where stationarity is required).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace toepfit
