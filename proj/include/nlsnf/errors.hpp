#pragma once

#include <stdexcept>
#include <string>

namespace nlsnf {

// Grid too coarse for the requested truncation or nonlinearity degree.
class SizingError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A tensor that should evaluate to a real number produced a large imaginary part.
class RealityViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// homological_solve was handed a class with zero phase divisor.
class ResonantClassError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Flow or simulation left the admissible amplitude range.
class BlowUpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace nlsnf
