#pragma once

#include <stdexcept>
#include <string>

namespace gbmfolio {

/// Input data is missing, malformed, or too short to use.
class DataError : public std::runtime_error {
public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// A quantity is mathematically undefined for the given input
/// (zero-variance Sharpe, constant-series correlation, ...).
class NumericError : public std::runtime_error {
public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Bad arguments or configuration supplied by the caller.
class UsageError : public std::invalid_argument {
public:
  explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace gbmfolio
