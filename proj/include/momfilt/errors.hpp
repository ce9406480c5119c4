#pragma once

#include <stdexcept>
#include <string>

namespace momfilt {

// A polynomial or density value failed a strict-positivity requirement.
class PositivityError : public std::runtime_error {
 public:
  explicit PositivityError(const std::string& what) : std::runtime_error(what) {}
};

// The requested operation is not defined for the given density variant.
class CapabilityError : public std::logic_error {
 public:
  explicit CapabilityError(const std::string& what) : std::logic_error(what) {}
};

// A moment sequence is not realizable by a positive density (Hankel test failed
// or an input was non-finite).
class FeasibilityError : public std::invalid_argument {
 public:
  explicit FeasibilityError(const std::string& what) : std::invalid_argument(what) {}
};

// The iterative solver hit its iteration cap or the line search collapsed
// before reaching the requested gradient tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, int iterations, double grad_inf_norm)
      : std::runtime_error(what), iterations(iterations), grad_inf_norm(grad_inf_norm) {}
  int iterations;
  double grad_inf_norm;
};

// A likelihood evaluated to (numerically) zero everywhere on the grid, so the
// posterior cannot be normalized.
class DegenerateLikelihoodError : public std::runtime_error {
 public:
  explicit DegenerateLikelihoodError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace momfilt
