#include "hodgekit/rate_fit.hpp"

#include <cmath>
#include <vector>

#include "hodgekit/errors.hpp"

namespace hodgekit {

RateFit fit_rate(std::span<const double> steps, std::span<const double> errors) {
  if (steps.size() != errors.size())
    throw Error(ErrorCode::shape, "rate fit needs one error per step size");
  RateFit fit;
  const std::size_t n = steps.size();
  if (n < 3) return fit;
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(errors[i] > 0.0) || !(steps[i] > 0.0)) return fit;
    x[i] = std::log(steps[i]);
    y[i] = std::log(errors[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) return fit;
  fit.rate = sxy / sxx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (my + fit.rate * (x[i] - mx));
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / static_cast<double>(n));
  fit.valid = true;
  return fit;
}

}  // namespace hodgekit
