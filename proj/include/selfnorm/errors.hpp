#pragma once

#include <stdexcept>
#include <string>

namespace selfnorm {

/// Thrown when a law, configuration or operation receives an argument outside
/// its documented domain.
class parameter_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a numerical procedure (quadrature, bisection) fails to reach its
/// tolerance. Carries the best bracket obtained before giving up.
class numeric_failure : public std::runtime_error {
 public:
  numeric_failure(const std::string& what, double lower, double upper)
      : std::runtime_error(what), lower_(lower), upper_(upper) {}

  double lower() const noexcept { return lower_; }
  double upper() const noexcept { return upper_; }

 private:
  double lower_;
  double upper_;
};

}  // namespace selfnorm
