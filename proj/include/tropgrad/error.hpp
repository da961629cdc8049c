#pragma once

#include <stdexcept>
#include <string>

namespace tropgrad {

// Malformed argument: non-finite entries, empty sets, bad parameters.
class InvalidInput : public std::invalid_argument {
 public:
  explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

// Vector lengths disagree, or a point is too short to live on a torus.
class DimensionError : public std::invalid_argument {
 public:
  explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

// A gradient or iterate became non-finite during a run.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace tropgrad
