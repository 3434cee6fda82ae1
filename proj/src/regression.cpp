#include "degenac/regression.hpp"

#include "degenac/error.hpp"

namespace degenac {

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidArgument("fit_line: x and y differ in length");
  if (x.size() < 2) throw InvalidArgument("fit_line: need at least 2 points");
  const double count = static_cast<double>(x.size());
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mean_x += x[i];
    mean_y += y[i];
  }
  mean_x /= count;
  mean_y /= count;

  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mean_x;
    const double dy = y[i] - mean_y;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }

  LineFit fit;
  if (sxx <= 0.0) {
    fit.intercept = mean_y;
    fit.sse = syy;
    return fit;
  }
  fit.slope = sxy / sxx;
  fit.intercept = mean_y - fit.slope * mean_x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.slope * x[i] + fit.intercept);
    fit.sse += r * r;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - fit.sse / syy : 0.0;
  return fit;
}

}  // namespace degenac
