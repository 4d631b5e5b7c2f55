#pragma once

// Greatest convex minorants, pool-adjacent-violators fitting and the
// brute-force max-min formula the two are checked against.

#include <cstddef>
#include <span>
#include <vector>

namespace mtrend {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// An ordered list of points with strictly increasing, finite abscissas.
/// A cumulative sum diagram starts at the origin; general diagrams
/// (e.g. a discretised Brownian path) need not.
class Diagram {
 public:
  explicit Diagram(std::vector<Point> points);

  std::span<const Point> points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  const Point& operator[](std::size_t i) const { return points_[i]; }

 private:
  std::vector<Point> points_;
};

/// Cumulative sum diagram of y_1..y_n: the n+1 points (k/n, (y_1+...+y_k)/n).
/// Partial sums are compensated.
Diagram cusum_diagram(std::span<const double> y);

/// Greatest convex minorant of a diagram in canonical form.
struct GcmFit {
  /// Indices of the diagram points the minorant touches, ascending; always
  /// contains the first and last index.
  std::vector<std::size_t> knots;
  /// slopes[k-1] is the minorant's slope on (x_{k-1}, x_k], k = 1..m.
  std::vector<double> slopes;
  /// Diagram abscissas x_0..x_m.
  std::vector<double> abscissas;
  /// Minorant value at every abscissa.
  std::vector<double> values;
};

/// Single left-to-right stack pass. A point is popped only when the newer
/// segment's slope is strictly below the older one, so collinear points stay
/// knots.
GcmFit gcm(const Diagram& d);

/// Knot indices of the greatest convex minorant of (x[i], y[i]). The caller
/// guarantees x is strictly increasing and both spans have the same length.
/// `knots` is cleared and refilled, which lets hot loops reuse its storage.
void convex_minorant_knots(std::span<const double> x, std::span<const double> y,
                           std::vector<std::size_t>& knots);

/// Left-hand derivative of the minorant at t, for t in (x_0, x_m]. At a
/// diagram abscissa this is the slope of the segment ending there.
double left_derivative(const GcmFit& fit, double t);

/// Strictly positive, finite observation weights.
class Weights {
 public:
  explicit Weights(std::vector<double> w);
  static Weights unit(std::size_t n);

  std::span<const double> values() const noexcept { return w_; }
  std::size_t size() const noexcept { return w_.size(); }
  bool is_unit() const noexcept { return unit_; }

 private:
  std::vector<double> w_;
  bool unit_ = false;
};

/// Compensated (Neumaier) prefix sums with exact-index range queries.
class PrefixSums {
 public:
  explicit PrefixSums(std::span<const double> values);

  std::size_t size() const noexcept { return hi_.size() - 1; }
  /// Sum of the first k values.
  double head(std::size_t k) const noexcept { return hi_[k] + lo_[k]; }
  /// Sum of values[first..last], zero-based and inclusive.
  double range(std::size_t first, std::size_t last) const noexcept {
    return (hi_[last + 1] - hi_[first]) + (lo_[last + 1] - lo_[first]);
  }

 private:
  std::vector<double> hi_;
  std::vector<double> lo_;
};

/// Level sets of an isotonic fit.
struct IsotonicBlocks {
  /// One-based index of the last observation in each block, ascending;
  /// the final entry is n.
  std::vector<std::size_t> ends;
  /// Fitted (weighted mean) value of each block.
  std::vector<double> levels;

  std::vector<double> expand() const;
};

IsotonicBlocks pava_blocks(std::span<const double> y, const Weights& w);

/// Weighted least-squares nondecreasing fit.
std::vector<double> pava(std::span<const double> y, const Weights& w);
std::vector<double> pava(std::span<const double> y);

/// max_{i<=k} min_{k<=j<=n} mean(y_i..y_j) by exhaustive enumeration, with
/// one-based k. O(n^2) per call; intended only as a test oracle.
double minmax_oracle(std::span<const double> y, std::size_t k);

}  // namespace mtrend
