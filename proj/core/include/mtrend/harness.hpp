#pragma once

// Replication engine: simulate many trend-plus-AR(1) series, apply an
// estimator, and tabulate the empirical distribution of its normalized error
// at fixed probe points, next to the matching limit law.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mtrend/limits.hpp"
#include "mtrend/trend_function.hpp"

namespace mtrend {

/// sqrt(p (1 - p) / reps): binomial standard error of an empirical CDF value.
double standard_error(double p, std::size_t reps);

/// The 15 percentile levels .025, .05, .1, .2, .25, .3, .4, .5, .6, .7, .75,
/// .8, .9, .95, .975.
std::vector<double> table_percentiles();
/// The 11 probe points -2.5, -2.0, ..., 2.5.
std::vector<double> table_z_probes();

enum class TableKind { interior, boundary, penalized };

std::string_view to_string(TableKind kind);
TableKind table_kind_from_string(std::string_view name);

struct ExperimentConfig {
  std::size_t n = 150;
  std::size_t reps = 2000;
  std::vector<double> rhos{0.5, 0.9};
  std::vector<std::string> phis{"square", "identity", "sqrt"};
  double marginal_sd = 0.25;
  std::uint64_t seed = 20100101;
  unsigned threads = 0;

  // interior
  std::vector<double> t0s{1.0 / 3.0, 0.5, 2.0 / 3.0};
  std::size_t sweep_points = 11;  ///< equispaced over [1/3, 2/3] for min/max

  /// Percentile levels (interior) or z points (boundary, penalized); empty
  /// selects table_percentiles() / table_z_probes().
  std::vector<double> probes;

  // boundary / penalized: exactly one of each pair is required for that table
  std::optional<double> ell;
  std::optional<std::size_t> m;
  std::optional<double> alpha;
  std::optional<double> lambda;

  // limit-law columns of the boundary / penalized tables
  std::size_t limit_reps = 10000;
  double limit_step = 1e-3;

  /// Throws std::invalid_argument naming the offending field.
  void validate(TableKind kind) const;
  std::vector<double> resolved_probes(TableKind kind) const;
};

struct ReportColumn {
  double rho = 0.0;
  std::string phi;
  /// "t0=0.3333", "min", "max" (interior); "n=150", "n=inf" (boundary, penalized)
  std::string label;
  /// "raw": n^(1/3) (estimate - phi(1)). "scaled": (raw + ell phi'(1)) / kappa1
  /// for the boundary table and raw / kappa1 for the penalized table, with
  /// kappa1 = (sigma^2 phi'(1) / 2)^(1/3). Interior columns are Xi_n / kappa.
  std::string axis = "scaled";
  std::vector<double> cdf;
  /// Per-probe binomial standard error (boundary / penalized columns only).
  std::vector<double> se;
  std::size_t reps = 0;
};

struct ReplicationReport {
  TableKind kind = TableKind::interior;
  /// Points at which every column's CDF is evaluated. Interior: the Chernoff
  /// quantiles at `ps`.
  std::vector<double> probes;
  std::vector<double> ps;  ///< interior only
  std::vector<double> se;  ///< interior only; standard_error(ps[i], reps)
  std::vector<ReportColumn> columns;
  nlohmann::json provenance;

  const ReportColumn& column(double rho, std::string_view phi, std::string_view label,
                             std::string_view axis) const;
};

std::string t0_label(double t0);
std::string sample_size_label(std::size_t n);

/// Stream id of replication `rep` for cell (rho, phi). Every table draws the
/// same series for the same (master seed, rho, phi, rep).
std::uint64_t cell_stream_id(double rho, std::string_view phi, std::size_t rep);

/// Interior tables: CDF of Xi_n / kappa at the Chernoff quantiles for each
/// configured t0, plus min/max over the t0 sweep. `chernoff` must contain
/// every configured percentile level.
ReplicationReport run_interior(const ExperimentConfig& cfg, const QuantileTable& chernoff);

/// Boundary-corrected last-point estimator: CDF of n^(1/3)(mu_tilde_m - phi(1)).
ReplicationReport run_boundary(const ExperimentConfig& cfg);

/// Penalized last-point estimator: CDF of n^(1/3)(mu_hat_p - phi(1)).
ReplicationReport run_penalized(const ExperimentConfig& cfg);

}  // namespace mtrend
