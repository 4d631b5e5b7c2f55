#include "mtrend/isotonic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace mtrend {

Diagram::Diagram(std::vector<Point> points) : points_(std::move(points)) {
  if (points_.size() < 2) {
    throw std::invalid_argument("diagram needs at least 2 points");
  }
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!std::isfinite(points_[i].x) || !std::isfinite(points_[i].y)) {
      throw std::invalid_argument("diagram point " + std::to_string(i) +
                                  " is not finite");
    }
    if (i > 0 && !(points_[i].x > points_[i - 1].x)) {
      throw std::invalid_argument(
          "diagram abscissas must be strictly increasing (point " +
          std::to_string(i) + ")");
    }
  }
}

Diagram cusum_diagram(std::span<const double> y) {
  if (y.empty()) throw std::invalid_argument("cusum_diagram: empty series");
  const PrefixSums sums(y);
  const auto n = static_cast<double>(y.size());
  std::vector<Point> pts(y.size() + 1);
  for (std::size_t k = 0; k <= y.size(); ++k) {
    pts[k] = {static_cast<double>(k) / n, sums.head(k) / n};
  }
  return Diagram(std::move(pts));
}

void convex_minorant_knots(std::span<const double> x, std::span<const double> y,
                           std::vector<std::size_t>& knots) {
  knots.clear();
  auto slope = [&](std::size_t a, std::size_t b) {
    return (y[b] - y[a]) / (x[b] - x[a]);
  };
  for (std::size_t i = 0; i < x.size(); ++i) {
    while (knots.size() >= 2) {
      const std::size_t last = knots[knots.size() - 1];
      const std::size_t prev = knots[knots.size() - 2];
      if (slope(last, i) < slope(prev, last)) {
        knots.pop_back();
      } else {
        break;
      }
    }
    knots.push_back(i);
  }
}

GcmFit gcm(const Diagram& d) {
  const std::size_t m = d.size();
  std::vector<double> xs(m), ys(m);
  for (std::size_t i = 0; i < m; ++i) {
    xs[i] = d[i].x;
    ys[i] = d[i].y;
  }

  GcmFit fit;
  convex_minorant_knots(xs, ys, fit.knots);
  fit.slopes.resize(m - 1);
  fit.values.resize(m);
  for (std::size_t s = 0; s + 1 < fit.knots.size(); ++s) {
    const std::size_t a = fit.knots[s];
    const std::size_t b = fit.knots[s + 1];
    const double slope = (ys[b] - ys[a]) / (xs[b] - xs[a]);
    fit.values[a] = ys[a];
    for (std::size_t k = a + 1; k <= b; ++k) {
      fit.slopes[k - 1] = slope;
      fit.values[k] = k == b ? ys[b] : ys[a] + slope * (xs[k] - xs[a]);
    }
  }
  fit.abscissas = std::move(xs);
  return fit;
}

double left_derivative(const GcmFit& fit, double t) {
  const auto& xs = fit.abscissas;
  if (xs.size() < 2 || !(t > xs.front()) || !(t <= xs.back())) {
    throw std::out_of_range("left_derivative: t outside (x_0, x_m]");
  }
  const auto it = std::lower_bound(xs.begin(), xs.end(), t);
  const auto k = static_cast<std::size_t>(it - xs.begin());
  return fit.slopes[k - 1];
}

Weights::Weights(std::vector<double> w) : w_(std::move(w)) {
  unit_ = true;
  for (std::size_t i = 0; i < w_.size(); ++i) {
    if (!std::isfinite(w_[i]) || !(w_[i] > 0.0)) {
      throw std::invalid_argument("weight " + std::to_string(i) +
                                  " is not strictly positive");
    }
    unit_ = unit_ && w_[i] == 1.0;
  }
}

Weights Weights::unit(std::size_t n) { return Weights(std::vector<double>(n, 1.0)); }

PrefixSums::PrefixSums(std::span<const double> values)
    : hi_(values.size() + 1, 0.0), lo_(values.size() + 1, 0.0) {
  double sum = 0.0;
  double comp = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
    hi_[i + 1] = sum;
    lo_[i + 1] = comp;
  }
}

std::vector<double> IsotonicBlocks::expand() const {
  std::vector<double> out;
  out.reserve(ends.empty() ? 0 : ends.back());
  std::size_t start = 0;
  for (std::size_t b = 0; b < ends.size(); ++b) {
    out.insert(out.end(), ends[b] - start, levels[b]);
    start = ends[b];
  }
  return out;
}

IsotonicBlocks pava_blocks(std::span<const double> y, const Weights& w) {
  if (y.size() != w.size()) {
    throw std::invalid_argument("pava: series and weights differ in length");
  }
  if (y.empty()) throw std::invalid_argument("pava: empty series");

  // Level values are always recomputed from prefix sums, so merging never
  // accumulates rounding error and equal-weight means match suffix means
  // computed elsewhere from the same sums bit for bit.
  std::vector<double> wy(y.begin(), y.end());
  if (!w.is_unit()) {
    for (std::size_t i = 0; i < wy.size(); ++i) wy[i] *= w.values()[i];
  }
  const PrefixSums num(wy);
  const PrefixSums den(w.values());
  auto mean = [&](std::size_t first, std::size_t last) {
    return num.range(first, last) / den.range(first, last);
  };

  std::vector<std::size_t> starts;
  std::vector<std::size_t> lasts;
  for (std::size_t i = 0; i < y.size(); ++i) {
    starts.push_back(i);
    lasts.push_back(i);
    while (starts.size() >= 2) {
      const std::size_t b = starts.size() - 1;
      if (mean(starts[b], lasts[b]) < mean(starts[b - 1], lasts[b - 1])) {
        lasts[b - 1] = lasts[b];
        starts.pop_back();
        lasts.pop_back();
      } else {
        break;
      }
    }
  }

  IsotonicBlocks blocks;
  blocks.ends.reserve(starts.size());
  blocks.levels.reserve(starts.size());
  for (std::size_t b = 0; b < starts.size(); ++b) {
    blocks.ends.push_back(lasts[b] + 1);
    blocks.levels.push_back(mean(starts[b], lasts[b]));
  }
  return blocks;
}

std::vector<double> pava(std::span<const double> y, const Weights& w) {
  return pava_blocks(y, w).expand();
}

std::vector<double> pava(std::span<const double> y) {
  return pava(y, Weights::unit(y.size()));
}

double minmax_oracle(std::span<const double> y, std::size_t k) {
  const std::size_t n = y.size();
  if (k < 1 || k > n) throw std::out_of_range("minmax_oracle: k outside [1, n]");
  long double best = -std::numeric_limits<long double>::infinity();
  for (std::size_t i = 1; i <= k; ++i) {
    long double sum = 0.0L;
    for (std::size_t j = i; j < k; ++j) sum += y[j - 1];
    long double inner = std::numeric_limits<long double>::infinity();
    for (std::size_t j = k; j <= n; ++j) {
      sum += y[j - 1];
      inner = std::min(inner, sum / static_cast<long double>(j - i + 1));
    }
    best = std::max(best, inner);
  }
  return static_cast<double>(best);
}

}  // namespace mtrend
