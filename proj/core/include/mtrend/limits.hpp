#pragma once

// Monte Carlo samplers for the three limit laws of the normalized trend
// estimators, all driven by a Brownian motion discretised on a fixed grid:
//
//   chernoff   2 argmin_s [W(s) + s^2]
//   boundary   [GCM over (-inf, ell] of sigma W(s) + phi'(1) s^2 / 2]'(0) - ell phi'(1)
//   penalized  sup_{t>0} [sigma W(t) - alpha phi(1) - phi'(1) t^2 / 2] / t
//
// Each replication r draws from Stream::derive(seed, r), so samples are
// reproducible bit for bit regardless of the worker count.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "mtrend/rng.hpp"

namespace mtrend {

/// Grid {i * step : lower <= i * step <= upper}. Zero is always a grid point;
/// the window ends are rounded to the nearest multiple of step.
struct BmGrid {
  double step = 1e-3;
  double lower = -2.5;
  double upper = 2.5;

  void validate() const;
  std::size_t left_count() const;   ///< points strictly below zero
  std::size_t right_count() const;  ///< points strictly above zero
  std::size_t size() const { return left_count() + right_count() + 1; }
  std::size_t zero_index() const { return left_count(); }
  double abscissa(std::size_t i) const {
    return (static_cast<double>(i) - static_cast<double>(left_count())) * step;
  }
};

/// Standard two-sided Brownian motion on the grid: W(0) = 0 and independent
/// normal(0, step) increments, the right arm drawn before the left arm.
/// `out` must have grid.size() entries; entry i is W(grid.abscissa(i)).
void two_sided_bm(const BmGrid& grid, Stream& stream, std::span<double> out);
std::vector<double> two_sided_bm(const BmGrid& grid, Stream& stream);

struct ChernoffLaw {};
struct BoundaryLaw {
  double ell = 1.0;
  double phi1_prime = 1.0;
  double sigma = 1.0;
};
struct PenalizedLaw {
  double alpha = 1.0;
  double phi1 = 1.0;
  double phi1_prime = 1.0;
  double sigma = 1.0;
};
using LimitLaw = std::variant<ChernoffLaw, BoundaryLaw, PenalizedLaw>;

std::string law_name(const LimitLaw& law);

struct SamplerOptions {
  unsigned threads = 0;           ///< 0 = all cores
  bool auto_widen = true;         ///< double the truncated window on frequent hits
  double warn_fraction = 0.01;    ///< hit fraction that triggers widening / warning
  int max_widenings = 4;
};

struct LimitDiagnostics {
  /// Fraction of replications whose optimiser sat on the lower / upper grid end
  /// (for the boundary law: whose minorant segment through 0 started at the
  /// left window end).
  double lower_hit_fraction = 0.0;
  double upper_hit_fraction = 0.0;
  int widenings = 0;
  bool warning = false;
  std::string message;
};

struct LimitSample {
  LimitLaw law;
  std::vector<double> values;
  /// Per replication: argmin s (chernoff), argmax t (penalized) or the left
  /// end of the minorant segment through 0 (boundary).
  std::vector<double> locations;
  BmGrid grid;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  LimitDiagnostics diagnostics;
};

BmGrid default_chernoff_grid();
/// Left end -5 max(1, sigma / phi'(1))^(2/3), right end ell.
BmGrid default_boundary_grid(double ell, double phi1_prime, double sigma);
/// One-sided window (0, 5 (sigma + alpha phi(1)) / phi'(1)].
BmGrid default_penalized_grid(double alpha, double phi1, double phi1_prime, double sigma);

LimitSample chernoff_sample(std::size_t reps, const BmGrid& grid, std::uint64_t seed,
                            const SamplerOptions& options = {});

LimitSample boundary_limit_sample(double ell, double phi1_prime, double sigma,
                                  std::size_t reps, const BmGrid& grid, std::uint64_t seed,
                                  const SamplerOptions& options = {});

LimitSample penalized_limit_sample(double alpha, double phi1, double phi1_prime,
                                   double sigma, std::size_t reps, const BmGrid& grid,
                                   std::uint64_t seed, const SamplerOptions& options = {});

/// Dispatches on the law; the grid's defaults come from the functions above.
LimitSample sample_limit(const LimitLaw& law, std::size_t reps, const BmGrid& grid,
                         std::uint64_t seed, const SamplerOptions& options = {});
BmGrid default_grid(const LimitLaw& law);

/// Empirical distribution of a sample.
class EmpiricalCdf {
 public:
  explicit EmpiricalCdf(std::vector<double> values);

  /// Fraction of values <= z.
  double operator()(double z) const;
  /// Type-1 quantile: the smallest value v with F(v) >= p, p in (0, 1).
  double quantile(double p) const;
  std::size_t size() const noexcept { return sorted_.size(); }
  std::span<const double> sorted() const noexcept { return sorted_; }

 private:
  std::vector<double> sorted_;
};

struct QuantileTable {
  std::vector<double> ps;
  std::vector<double> quantiles;
  // provenance
  LimitLaw law;
  BmGrid grid;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  LimitDiagnostics diagnostics;

  /// Quantile at p, which must be one of ps (to within 1e-12).
  double at(double p) const;
};

/// ps must be strictly increasing inside (0, 1).
QuantileTable quantile_table(const LimitSample& sample, std::span<const double> ps);

QuantileTable chernoff_quantiles(std::span<const double> ps, std::size_t reps,
                                 const BmGrid& grid, std::uint64_t seed,
                                 const SamplerOptions& options = {});

}  // namespace mtrend
