#include "mtrend/trend_function.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace mtrend {

TrendFunction::TrendFunction(TrendKind kind, std::string name,
                             std::function<double(double)> value,
                             std::function<double(double)> derivative)
    : kind_(kind),
      name_(std::move(name)),
      value_(std::move(value)),
      derivative_(std::move(derivative)) {}

TrendFunction TrendFunction::sqrt() {
  return {TrendKind::sqrt, "sqrt", [](double t) { return std::sqrt(t); },
          [](double t) { return 0.5 / std::sqrt(t); }};
}

TrendFunction TrendFunction::identity() {
  return {TrendKind::identity, "identity", [](double t) { return t; },
          [](double) { return 1.0; }};
}

TrendFunction TrendFunction::square() {
  return {TrendKind::square, "square", [](double t) { return t * t; },
          [](double t) { return 2.0 * t; }};
}

TrendFunction TrendFunction::custom(std::string name, std::function<double(double)> value,
                                    std::function<double(double)> derivative) {
  if (!value || !derivative) {
    throw std::invalid_argument("custom trend needs a value and a derivative");
  }
  double prev = value(0.0);
  for (int i = 1; i <= 1000; ++i) {
    const double cur = value(i / 1000.0);
    if (!std::isfinite(cur) || cur < prev) {
      throw std::invalid_argument("custom trend '" + name +
                                  "' is not finite and nondecreasing on [0, 1]");
    }
    prev = cur;
  }
  return {TrendKind::custom, std::move(name), std::move(value), std::move(derivative)};
}

TrendFunction TrendFunction::from_name(std::string_view name) {
  if (name == "sqrt") return sqrt();
  if (name == "identity" || name == "t") return identity();
  if (name == "square" || name == "t2" || name == "t^2") return square();
  throw std::invalid_argument("unknown trend '" + std::string(name) +
                              "' (expected sqrt, identity or square)");
}

}  // namespace mtrend
