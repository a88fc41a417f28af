#pragma once

#include <stdexcept>
#include <string>

namespace rmt {

// Bad input: malformed files, violated preconditions, inconsistent parameters.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical procedure failed to reach its target (non-convergence,
// singular integrand, no admissible root).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what, double residual = 0.0)
      : std::runtime_error(what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace rmt
