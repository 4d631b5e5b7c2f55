#include "mtrend/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mtrend {

void Ar1Spec::validate() const {
  if (!std::isfinite(rho) || !(std::abs(rho) < 1.0)) {
    throw std::invalid_argument("AR(1) coefficient must satisfy |rho| < 1");
  }
  if (!std::isfinite(marginal_sd) || !(marginal_sd > 0.0)) {
    throw std::invalid_argument("AR(1) marginal sd must be positive");
  }
}

double Ar1Spec::innovation_sd() const {
  validate();
  return marginal_sd * std::sqrt(1.0 - rho * rho);
}

std::vector<double> ar1_path(std::size_t n, const Ar1Spec& spec, Stream& stream) {
  if (n == 0) throw std::invalid_argument("ar1_path: length must be positive");
  const double innov = spec.innovation_sd();
  double x = spec.marginal_sd * stream.normal();
  for (std::size_t i = 0; i < spec.burn_in; ++i) x = spec.rho * x + innov * stream.normal();

  std::vector<double> path(n);
  path[0] = x;
  for (std::size_t k = 1; k < n; ++k) {
    x = spec.rho * x + innov * stream.normal();
    path[k] = x;
  }
  return path;
}

std::vector<double> ar1_path(std::size_t n, const Ar1Spec& spec) {
  Stream stream(spec.seed);
  return ar1_path(n, spec, stream);
}

double long_run_variance_ar1(const Ar1Spec& spec) {
  spec.validate();
  return spec.marginal_sd * spec.marginal_sd * (1.0 + spec.rho) / (1.0 - spec.rho);
}

SyntheticSeries synthesize(std::size_t n, const TrendFunction& phi, const Ar1Spec& spec,
                           Stream& stream) {
  SyntheticSeries out;
  out.noise = ar1_path(n, spec, stream);
  out.trend.resize(n);
  out.values.resize(n);
  const auto nd = static_cast<double>(n);
  for (std::size_t k = 1; k <= n; ++k) {
    out.trend[k - 1] = phi(static_cast<double>(k) / nd);
    out.values[k - 1] = out.trend[k - 1] + out.noise[k - 1];
  }
  return out;
}

SyntheticSeries synthesize(std::size_t n, const TrendFunction& phi, const Ar1Spec& spec) {
  Stream stream(spec.seed);
  return synthesize(n, phi, spec, stream);
}

AcfResult acf(std::span<const double> series, std::size_t max_lag) {
  const std::size_t n = series.size();
  if (max_lag >= n) {
    throw std::invalid_argument("acf: max_lag " + std::to_string(max_lag) +
                                " must be below the series length " + std::to_string(n));
  }
  const auto [lo, hi] = std::minmax_element(series.begin(), series.end());
  if (*lo == *hi) throw std::invalid_argument("acf: series has zero variance");
  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(n);

  std::vector<double> centred(n);
  for (std::size_t i = 0; i < n; ++i) centred[i] = series[i] - mean;

  auto autocov = [&](std::size_t h) {
    double s = 0.0;
    for (std::size_t i = 0; i + h < n; ++i) s += centred[i] * centred[i + h];
    return s / static_cast<double>(n);
  };
  const double c0 = autocov(0);
  if (!(c0 > 0.0)) throw std::invalid_argument("acf: series has zero variance");

  AcfResult out;
  out.lags.resize(max_lag + 1);
  out.values.resize(max_lag + 1);
  for (std::size_t h = 0; h <= max_lag; ++h) {
    out.lags[h] = h;
    out.values[h] = h == 0 ? 1.0 : autocov(h) / c0;
  }
  return out;
}

}  // namespace mtrend
