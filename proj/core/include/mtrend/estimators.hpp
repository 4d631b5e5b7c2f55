#pragma once

// Trend estimators built on the isotonic fit: the full fit, the penalized
// last-point estimator and the boundary-corrected last-point estimator.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "mtrend/trend_function.hpp"

namespace mtrend {

struct TrendFit {
  /// mu_tilde[k-1] is the isotonic estimate of the k-th mean.
  std::vector<double> mu_tilde;
  /// Cumulative-sum-diagram indices bounding the level sets: 0, the last
  /// index of every block, ending with n.
  std::vector<std::size_t> knots;

  std::size_t n() const noexcept { return mu_tilde.size(); }
  /// One-based access.
  double at(std::size_t k) const { return mu_tilde.at(k - 1); }
};

TrendFit isotonic_trend(std::span<const double> y);

/// Penalty for the last-point estimator. Unless overridden, lambda = alpha * n^(1/3).
struct PenaltySpec {
  double alpha = 1.0;
  std::optional<double> lambda;

  void validate() const;
  double lambda_for(std::size_t n) const;
};

/// Offset for the boundary-corrected estimator. Unless overridden,
/// m = n - ceil(ell * n^(2/3)), i.e. the index floor(n * t_n) of the point
/// t_n = 1 - ell * n^(-1/3).
struct BoundarySpec {
  double ell = 1.0;
  std::optional<std::size_t> m;

  void validate() const;
  /// Resolved one-based index; throws std::out_of_range unless 1 <= m <= n.
  std::size_t m_for(std::size_t n) const;
};

struct PenalizedEstimate {
  double value = 0.0;
  /// Smallest one-based start index i attaining the maximum.
  std::size_t start = 0;
};

/// max_{i<=n} (y_i + ... + y_n) / (n - i + 1 + lambda).
PenalizedEstimate penalized_last_detail(std::span<const double> y, const PenaltySpec& p);
double penalized_last(std::span<const double> y, const PenaltySpec& p);

/// mu_tilde at the resolved index m.
double boundary_corrected_last(std::span<const double> y, const BoundarySpec& b);
double boundary_corrected_last(const TrendFit& fit, const BoundarySpec& b);

/// Index floor(n * t) of the diagram abscissa a time point t snaps to, with a
/// few ulps of slack so that e.g. t = 1/3, n = 150 gives 50.
std::size_t snap_index(std::size_t n, double t);

/// Interior scale (sigma^2 * phi'(t) / 2)^(1/3) for long-run variance sigma2.
double interior_kappa(double sigma2, double phi_prime);

struct XiStatistic {
  double xi = 0.0;                ///< n^(1/3) (mu_tilde_k - phi(k/n))
  std::optional<double> scaled;   ///< xi / kappa, when sigma was supplied
  std::optional<double> kappa;
  std::size_t index = 0;          ///< k = floor(n t)
  double t = 0.0;                 ///< k / n
};

/// Centred and scaled isotonic error at t in (0, 1]; t is snapped to
/// floor(n t)/n. `sigma` is the long-run standard deviation; when given,
/// phi'(k/n) must be positive.
XiStatistic xi_statistic(const TrendFit& fit, const TrendFunction& phi, double t,
                         std::optional<double> sigma);
XiStatistic xi_statistic(std::span<const double> y, const TrendFunction& phi, double t,
                         std::optional<double> sigma);

}  // namespace mtrend
