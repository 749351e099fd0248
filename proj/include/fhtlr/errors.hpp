#pragma once

#include <stdexcept>
#include <string>

namespace fhtlr {

// Base type for everything this library throws on purpose.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Out-of-range coordinate or flat index; the message names the offending dimension.
class IndexError : public Error {
 public:
  using Error::Error;
};

// Incompatible matrix/tensor shapes.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Violated input contract (non-stochastic rows, bad probabilities, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Dense materialization would exceed the configured size limit.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// A learner left the finite/bounded regime; message carries diagnostics.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

// Malformed or unknown keys in a config file.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace fhtlr
