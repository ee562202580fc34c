#pragma once

#include <cstddef>
#include <vector>

namespace protmeas {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
};

/// Ordinary least squares y = slope x + intercept. Needs two distinct x.
LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y);

/// Least squares in log10-log10; every value must be positive.
LinearFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace protmeas
