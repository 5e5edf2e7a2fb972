#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace slowvary {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed expression, rate, registry or cap; a programming or input error.
class AlgebraError : public Error {
 public:
  using Error::Error;
};

// Text that does not match a grammar. offset is a 0-based byte offset.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// A problem specification violates an assumption (eigendata, gap, degree).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A construction could not finish: solvability, iteration cap, cap overflow.
class ConstructionError : public Error {
 public:
  using Error::Error;
};

// Numerical experiment failure: instability, bad configuration, divergence.
class NumericsError : public Error {
 public:
  using Error::Error;
};

}  // namespace slowvary
