#pragma once

#include <stdexcept>
#include <string>

namespace rdlab {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A computation left its domain of validity (blow-up guard, missing bracket,
/// weighted-class guard, ...). CLI maps this to exit code 1.
class NumericError : public Error {
public:
  using Error::Error;
};

/// Bad parameters, malformed configs, schema mismatches. CLI exit code 2.
class ConfigError : public Error {
public:
  using Error::Error;
};

} // namespace rdlab
