#pragma once

#include <span>

namespace hodgekit {

/// Least-squares slope of log(error) against log(step).
struct RateFit {
  double rate = 0.0;
  double residual = 0.0;  // RMS deviation of the log-log fit
  bool valid = false;     // at least 3 points, all errors positive
};

RateFit fit_rate(std::span<const double> steps, std::span<const double> errors);

}  // namespace hodgekit
