#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rghl {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidSearchSpace : public Error {
 public:
  using Error::Error;
};

class UnknownValue : public Error {
 public:
  UnknownValue(std::string dimension, std::string value)
      : Error("value '" + value + "' is not on the grid of dimension '" +
              dimension + "'"),
        dimension_(std::move(dimension)),
        value_(std::move(value)) {}

  const std::string& dimension() const { return dimension_; }
  const std::string& value() const { return value_; }

 private:
  std::string dimension_;
  std::string value_;
};

class GeneOutOfRange : public Error {
 public:
  explicit GeneOutOfRange(std::size_t index)
      : Error("gene " + std::to_string(index) + " is out of range"),
        index_(index) {}

  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

class InsufficientHistory : public Error {
 public:
  using Error::Error;
};

class PopulationTooSmall : public Error {
 public:
  using Error::Error;
};

class EmptyMemory : public Error {
 public:
  using Error::Error;
};

class BudgetExhausted : public Error {
 public:
  using Error::Error;
};

class UnsupportedKind : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace rghl
