#pragma once

#include <stdexcept>
#include <string>

namespace chaospec {

// Thrown when a numerical routine cannot reach its requested accuracy
// (quadrature non-convergence, overflow, precision budget exceeded).
// CLI maps this to exit status 3; parameter errors (std::invalid_argument)
// map to exit status 2.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what_arg,
                        double requested_tol = 0.0, double achieved_tol = 0.0)
      : std::runtime_error(what_arg),
        requested(requested_tol),
        achieved(achieved_tol) {}

  double requested;
  double achieved;
};

// A law with all mass at chaos order 0 has no defined noise-sensitivity
// correlation.
class DegenerateLawError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace chaospec
