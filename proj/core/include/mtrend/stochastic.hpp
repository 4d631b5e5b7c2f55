#pragma once

// Synthetic series: Gaussian AR(1) fluctuations around a monotone trend,
// their long-run variance, and sample autocorrelations for residual checks.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mtrend/rng.hpp"
#include "mtrend/trend_function.hpp"

namespace mtrend {

/// Observed values with optional labels (e.g. years).
struct TimeSeries {
  std::vector<double> values;
  std::vector<std::string> labels;  ///< empty, or one per value

  std::size_t size() const noexcept { return values.size(); }
};

/// X_k = rho X_{k-1} + e_k, e_k i.i.d. normal, scaled so sd(X_k) = marginal_sd.
struct Ar1Spec {
  double rho = 0.0;
  double marginal_sd = 0.25;
  std::uint64_t seed = 0;
  std::size_t burn_in = 0;

  void validate() const;
  /// marginal_sd * sqrt(1 - rho^2)
  double innovation_sd() const;
};

/// Stationary AR(1) path of length n. The first value is an exact draw from
/// the marginal law; burn_in further steps are discarded before emitting.
std::vector<double> ar1_path(std::size_t n, const Ar1Spec& spec);
std::vector<double> ar1_path(std::size_t n, const Ar1Spec& spec, Stream& stream);

/// lim Var(S_n)/n = marginal_sd^2 (1 + rho) / (1 - rho).
double long_run_variance_ar1(const Ar1Spec& spec);

struct SyntheticSeries {
  std::vector<double> values;  ///< y_k = phi(k/n) + X_k
  std::vector<double> trend;   ///< phi(k/n)
  std::vector<double> noise;   ///< X_k
};

SyntheticSeries synthesize(std::size_t n, const TrendFunction& phi, const Ar1Spec& spec);
SyntheticSeries synthesize(std::size_t n, const TrendFunction& phi, const Ar1Spec& spec,
                           Stream& stream);

struct AcfResult {
  std::vector<std::size_t> lags;
  std::vector<double> values;
};

/// Mean-centred sample autocorrelations for lags 0..max_lag using the biased
/// (1/n) covariance estimator.
AcfResult acf(std::span<const double> series, std::size_t max_lag);

}  // namespace mtrend
