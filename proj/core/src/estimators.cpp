#include "mtrend/estimators.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "mtrend/isotonic.hpp"

namespace mtrend {

TrendFit isotonic_trend(std::span<const double> y) {
  if (y.empty()) throw std::invalid_argument("isotonic_trend: empty series");
  IsotonicBlocks blocks = pava_blocks(y, Weights::unit(y.size()));
  TrendFit fit;
  fit.mu_tilde = blocks.expand();
  fit.knots.reserve(blocks.ends.size() + 1);
  fit.knots.push_back(0);
  fit.knots.insert(fit.knots.end(), blocks.ends.begin(), blocks.ends.end());
  return fit;
}

void PenaltySpec::validate() const {
  if (!std::isfinite(alpha) || !(alpha > 0.0)) {
    throw std::invalid_argument("penalty alpha must be positive");
  }
  if (lambda && (!std::isfinite(*lambda) || *lambda < 0.0)) {
    throw std::invalid_argument("penalty lambda must be nonnegative");
  }
}

double PenaltySpec::lambda_for(std::size_t n) const {
  validate();
  if (lambda) return *lambda;
  return alpha * std::cbrt(static_cast<double>(n));
}

void BoundarySpec::validate() const {
  if (!std::isfinite(ell) || !(ell > 0.0)) {
    throw std::invalid_argument("boundary ell must be positive");
  }
}

std::size_t BoundarySpec::m_for(std::size_t n) const {
  if (m) {
    if (*m < 1 || *m > n) {
      throw std::out_of_range("boundary index m=" + std::to_string(*m) +
                              " outside [1, " + std::to_string(n) + "]");
    }
    return *m;
  }
  validate();
  const double nd = static_cast<double>(n);
  const double offset = std::ceil(ell * std::cbrt(nd * nd));
  if (!(offset < nd)) {
    throw std::out_of_range("boundary offset ceil(ell n^(2/3)) = " +
                            std::to_string(offset) + " leaves no index for n=" +
                            std::to_string(n));
  }
  return n - static_cast<std::size_t>(offset);
}

PenalizedEstimate penalized_last_detail(std::span<const double> y, const PenaltySpec& p) {
  if (y.empty()) throw std::invalid_argument("penalized_last: empty series");
  const std::size_t n = y.size();
  const double lambda = p.lambda_for(n);
  const PrefixSums sums(y);
  PenalizedEstimate best{-std::numeric_limits<double>::infinity(), 0};
  for (std::size_t i = 1; i <= n; ++i) {
    const double len = static_cast<double>(n - i + 1);
    const double v = sums.range(i - 1, n - 1) / (len + lambda);
    if (v > best.value) best = {v, i};
  }
  return best;
}

double penalized_last(std::span<const double> y, const PenaltySpec& p) {
  return penalized_last_detail(y, p).value;
}

double boundary_corrected_last(const TrendFit& fit, const BoundarySpec& b) {
  return fit.at(b.m_for(fit.n()));
}

double boundary_corrected_last(std::span<const double> y, const BoundarySpec& b) {
  if (y.empty()) throw std::invalid_argument("boundary_corrected_last: empty series");
  const std::size_t m = b.m_for(y.size());
  return isotonic_trend(y).at(m);
}

std::size_t snap_index(std::size_t n, double t) {
  if (!std::isfinite(t) || !(t > 0.0) || t > 1.0) {
    throw std::out_of_range("time point must lie in (0, 1]");
  }
  const double nt = static_cast<double>(n) * t;
  const double k = std::floor(nt * (1.0 + 4 * std::numeric_limits<double>::epsilon()));
  if (k < 1.0) {
    throw std::out_of_range("time point " + std::to_string(t) +
                            " snaps to index 0 for n=" + std::to_string(n));
  }
  return static_cast<std::size_t>(k);
}

double interior_kappa(double sigma2, double phi_prime) {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("long-run variance must be positive");
  if (!(phi_prime > 0.0)) {
    throw std::invalid_argument("kappa needs phi'(t) > 0, got " + std::to_string(phi_prime));
  }
  return std::cbrt(0.5 * sigma2 * phi_prime);
}

XiStatistic xi_statistic(const TrendFit& fit, const TrendFunction& phi, double t,
                         std::optional<double> sigma) {
  const std::size_t n = fit.n();
  XiStatistic out;
  out.index = snap_index(n, t);
  out.t = static_cast<double>(out.index) / static_cast<double>(n);
  out.xi = std::cbrt(static_cast<double>(n)) * (fit.at(out.index) - phi(out.t));
  if (sigma) {
    out.kappa = interior_kappa(*sigma * *sigma, phi.derivative(out.t));
    out.scaled = out.xi / *out.kappa;
  }
  return out;
}

XiStatistic xi_statistic(std::span<const double> y, const TrendFunction& phi, double t,
                         std::optional<double> sigma) {
  return xi_statistic(isotonic_trend(y), phi, t, sigma);
}

}  // namespace mtrend
