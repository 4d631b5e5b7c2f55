#pragma once

#include <functional>
#include <string>
#include <string_view>

namespace mtrend {

enum class TrendKind { sqrt, identity, square, custom };

/// A continuous nondecreasing trend phi on [0, 1] with its derivative.
/// Observation k of a length-n series has mean phi(k/n).
class TrendFunction {
 public:
  static TrendFunction sqrt();
  static TrendFunction identity();
  static TrendFunction square();

  /// User-supplied trend. Monotonicity is checked on a 1001-point grid.
  static TrendFunction custom(std::string name, std::function<double(double)> value,
                              std::function<double(double)> derivative);

  /// Accepts "sqrt", "identity" (or "t"), "square" (or "t2", "t^2").
  static TrendFunction from_name(std::string_view name);

  double operator()(double t) const { return value_(t); }
  double derivative(double t) const { return derivative_(t); }

  TrendKind kind() const noexcept { return kind_; }
  const std::string& name() const noexcept { return name_; }

 private:
  TrendFunction(TrendKind kind, std::string name, std::function<double(double)> value,
                std::function<double(double)> derivative);

  TrendKind kind_;
  std::string name_;
  std::function<double(double)> value_;
  std::function<double(double)> derivative_;
};

}  // namespace mtrend
