#include "degenac/field.hpp"

#include <algorithm>
#include <cmath>

#include "degenac/error.hpp"

namespace degenac {

Field::Field(double a, double b, std::vector<double> values)
    : a_(a), b_(b), values_(std::move(values)) {
  if (!(a_ < b_)) throw InvalidArgument("field domain requires a < b");
  if (values_.size() < 3) throw InvalidArgument("field requires at least 2 cells");
  for (double v : values_) {
    if (!std::isfinite(v)) throw InvalidArgument("field values must be finite");
  }
}

Field Field::sample(double a, double b, std::size_t cells, const std::function<double(double)>& f) {
  if (cells < 2) throw InvalidArgument("field requires at least 2 cells");
  std::vector<double> values(cells + 1);
  const double h = (b - a) / static_cast<double>(cells);
  for (std::size_t i = 0; i <= cells; ++i) {
    // Pin the last node to b exactly.
    const double x = i == cells ? b : a + static_cast<double>(i) * h;
    values[i] = f(x);
  }
  return Field(a, b, std::move(values));
}

std::vector<double> Field::nodes() const {
  std::vector<double> xs(size());
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = x(i);
  return xs;
}

Field Field::with_values(std::vector<double> values) const {
  if (values.size() != values_.size()) throw InvalidArgument("with_values: size mismatch");
  Field out = *this;
  out.values_ = std::move(values);
  return out;
}

double Field::interpolate(double x) const {
  if (x <= a_) return values_.front();
  if (x >= b_) return values_.back();
  const double h = step();
  const double pos = (x - a_) / h;
  const auto i = std::min(static_cast<std::size_t>(pos), cells() - 1);
  const double t = pos - static_cast<double>(i);
  return (1.0 - t) * values_[i] + t * values_[i + 1];
}

bool Field::same_grid(const Field& other) const noexcept {
  return a_ == other.a_ && b_ == other.b_ && values_.size() == other.values_.size();
}

double max_abs_difference(const Field& u, const Field& w) {
  if (!u.same_grid(w)) throw InvalidArgument("fields live on different grids");
  double worst = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) worst = std::max(worst, std::fabs(u[i] - w[i]));
  return worst;
}

double l1_distance(const Field& u, const std::function<double(double)>& g) {
  const double h = u.step();
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double weight = (i == 0 || i + 1 == u.size()) ? 0.5 : 1.0;
    sum += weight * std::fabs(u[i] - g(u.x(i)));
  }
  return sum * h;
}

}  // namespace degenac
