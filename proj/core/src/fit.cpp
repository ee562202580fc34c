#include "protmeas/fit.hpp"

#include <cmath>

#include "protmeas/errors.hpp"

namespace protmeas {

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) {
    throw DimensionError("least_squares: x and y differ in length");
  }
  const std::size_t n = x.size();
  if (n < 2) {
    throw ConfigurationError("least_squares: need at least two points");
  }
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) {
    throw NumericalError("least_squares: all x values coincide");
  }
  const double slope = sxy / sxx;
  return LinearFit{
      .slope = slope,
      .intercept = my - slope * mx,
      .r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0,
      .points = n,
  };
}

LinearFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx(x.size());
  std::vector<double> ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0)) {
      throw NumericalError("loglog_fit: non-positive abscissa");
    }
    lx[i] = std::log10(x[i]);
  }
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!(y[i] > 0.0)) {
      throw NumericalError("loglog_fit: non-positive value");
    }
    ly[i] = std::log10(y[i]);
  }
  return least_squares(lx, ly);
}

}  // namespace protmeas
