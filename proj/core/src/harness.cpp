#include "mtrend/harness.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "mtrend/estimators.hpp"
#include "mtrend/parallel.hpp"
#include "mtrend/rng.hpp"
#include "mtrend/serialize.hpp"
#include "mtrend/stochastic.hpp"

namespace mtrend {

double standard_error(double p, std::size_t reps) {
  if (!(p > 0.0) || !(p < 1.0)) throw std::out_of_range("standard_error: p must lie in (0, 1)");
  if (reps == 0) throw std::invalid_argument("standard_error: reps must be positive");
  return std::sqrt(p * (1.0 - p) / static_cast<double>(reps));
}

std::vector<double> table_percentiles() {
  return {.025, .05, .1, .2, .25, .3, .4, .5, .6, .7, .75, .8, .9, .95, .975};
}

std::vector<double> table_z_probes() {
  std::vector<double> z;
  for (int i = -5; i <= 5; ++i) z.push_back(0.5 * i);
  return z;
}

std::string_view to_string(TableKind kind) {
  switch (kind) {
    case TableKind::interior: return "interior";
    case TableKind::boundary: return "boundary";
    case TableKind::penalized: return "penalized";
  }
  return "?";
}

TableKind table_kind_from_string(std::string_view name) {
  if (name == "interior") return TableKind::interior;
  if (name == "boundary") return TableKind::boundary;
  if (name == "penalized") return TableKind::penalized;
  throw std::invalid_argument("which: unknown table '" + std::string(name) +
                              "' (expected interior, boundary or penalized)");
}

namespace {

[[noreturn]] void bad_field(const std::string& field, const std::string& reason) {
  throw std::invalid_argument(field + ": " + reason);
}

}  // namespace

void ExperimentConfig::validate(TableKind kind) const {
  if (n < 2) bad_field("n", "sample size must be at least 2");
  if (reps < 1) bad_field("reps", "must be at least 1");
  if (rhos.empty()) bad_field("rho", "at least one value required");
  for (double r : rhos) {
    if (!std::isfinite(r) || !(std::abs(r) < 1.0)) bad_field("rho", "values must satisfy |rho| < 1");
  }
  if (phis.empty()) bad_field("phi", "at least one trend required");
  for (const auto& p : phis) TrendFunction::from_name(p);
  if (!std::isfinite(marginal_sd) || !(marginal_sd > 0.0)) bad_field("marginal_sd", "must be positive");

  const auto probe_list = resolved_probes(kind);
  for (std::size_t i = 1; i < probe_list.size(); ++i) {
    if (!(probe_list[i] > probe_list[i - 1])) bad_field("probes", "must be strictly increasing");
  }

  switch (kind) {
    case TableKind::interior:
      if (t0s.empty()) bad_field("t0", "at least one value required");
      for (double t : t0s) {
        if (!(t > 0.0) || !(t < 1.0)) bad_field("t0", "values must lie in (0, 1)");
      }
      if (sweep_points < 2) bad_field("sweep_points", "must be at least 2");
      for (double p : probe_list) {
        if (!(p > 0.0) || !(p < 1.0)) bad_field("probes", "percentile levels must lie in (0, 1)");
      }
      break;
    case TableKind::boundary:
      if (ell.has_value() == m.has_value()) bad_field("ell", "exactly one of ell or m is required");
      if (ell && (!std::isfinite(*ell) || !(*ell > 0.0))) bad_field("ell", "must be positive");
      if (m && (*m < 1 || *m > n)) bad_field("m", "must lie in [1, n]");
      break;
    case TableKind::penalized:
      if (alpha.has_value() == lambda.has_value()) {
        bad_field("alpha", "exactly one of alpha or lambda is required");
      }
      if (alpha && (!std::isfinite(*alpha) || !(*alpha > 0.0))) bad_field("alpha", "must be positive");
      if (lambda && (!std::isfinite(*lambda) || *lambda < 0.0)) bad_field("lambda", "must be nonnegative");
      break;
  }
  if (kind != TableKind::interior) {
    if (limit_reps < 1) bad_field("limit_reps", "must be at least 1");
    if (!(limit_step > 0.0)) bad_field("limit_step", "must be positive");
  }
}

std::vector<double> ExperimentConfig::resolved_probes(TableKind kind) const {
  if (!probes.empty()) return probes;
  return kind == TableKind::interior ? table_percentiles() : table_z_probes();
}

const ReportColumn& ReplicationReport::column(double rho, std::string_view phi,
                                              std::string_view label,
                                              std::string_view axis) const {
  for (const auto& c : columns) {
    if (c.rho == rho && c.phi == phi && c.label == label && c.axis == axis) return c;
  }
  throw std::out_of_range("report has no column (rho=" + std::to_string(rho) + ", " +
                          std::string(phi) + ", " + std::string(label) + ", " +
                          std::string(axis) + ")");
}

std::string t0_label(double t0) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "t0=%.4g", t0);
  return buf;
}

std::string sample_size_label(std::size_t n) { return "n=" + std::to_string(n); }

std::uint64_t cell_stream_id(double rho, std::string_view phi, std::size_t rep) {
  const std::uint64_t cell = hash_combine(fnv1a64(phi), std::bit_cast<std::uint64_t>(rho));
  return hash_combine(cell, rep);
}

namespace {

// Simulates `reps` series for one (rho, phi) cell and returns
// reps x width statistics computed by `stat`, row-major by replication.
template <class StatFn>
std::vector<double> simulate_cell(const ExperimentConfig& cfg, double rho,
                                  const TrendFunction& phi, std::size_t width, StatFn stat) {
  const Ar1Spec spec{rho, cfg.marginal_sd, 0, 0};
  spec.validate();
  std::vector<double> out(cfg.reps * width);
  parallel_for(cfg.reps, cfg.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      Stream stream = Stream::derive(cfg.seed, cell_stream_id(rho, phi.name(), r));
      const SyntheticSeries series = synthesize(cfg.n, phi, spec, stream);
      stat(series.values, std::span<double>(out.data() + r * width, width));
    }
  });
  return out;
}

std::vector<double> column_of(const std::vector<double>& rows, std::size_t width, std::size_t j) {
  std::vector<double> col(rows.size() / width);
  for (std::size_t r = 0; r < col.size(); ++r) col[r] = rows[r * width + j];
  return col;
}

std::vector<double> cdf_at(const EmpiricalCdf& cdf, const std::vector<double>& probes) {
  std::vector<double> v;
  v.reserve(probes.size());
  for (double z : probes) v.push_back(cdf(z));
  return v;
}

std::vector<double> binomial_se(const std::vector<double>& cdf, std::size_t reps) {
  std::vector<double> se;
  se.reserve(cdf.size());
  for (double f : cdf) se.push_back(std::sqrt(f * (1.0 - f) / static_cast<double>(reps)));
  return se;
}

nlohmann::json base_provenance(const ExperimentConfig& cfg, TableKind kind) {
  nlohmann::json config = to_json(cfg);
  nlohmann::json prov;
  prov["tool"] = "mtrend";
  prov["version"] = version();
  prov["table"] = std::string(to_string(kind));
  prov["config"] = config;
  prov["config_hash"] = hash_hex(fnv1a64(config.dump()));
  prov["seed"] = cfg.seed;
  prov["stream_derivation"] = "derive_seed(seed, cell_stream_id(rho, phi, rep))";
  return prov;
}

// Shared tail of the boundary and penalized tables.
// The "scaled" axis is (raw + shift(phi)) / kappa(1), whose limit depends on a
// single dimensionless parameter.
template <class EstimateFn, class LawFn, class ShiftFn>
ReplicationReport run_last_point(const ExperimentConfig& cfg, TableKind kind,
                                 EstimateFn estimate, LawFn law_for, ShiftFn shift) {
  cfg.validate(kind);
  ReplicationReport report;
  report.kind = kind;
  report.probes = cfg.resolved_probes(kind);
  report.provenance = base_provenance(cfg, kind);
  nlohmann::json limits = nlohmann::json::array();

  const double root = std::cbrt(static_cast<double>(cfg.n));
  for (const auto& phi_name : cfg.phis) {
    const TrendFunction phi = TrendFunction::from_name(phi_name);
    const double phi1 = phi(1.0);
    for (double rho : cfg.rhos) {
      const Ar1Spec spec{rho, cfg.marginal_sd, 0, 0};
      const double sigma = std::sqrt(long_run_variance_ar1(spec));
      const double kappa = interior_kappa(sigma * sigma, phi.derivative(1.0));

      const auto raw = simulate_cell(cfg, rho, phi, 1, [&](std::span<const double> y,
                                                           std::span<double> out) {
        out[0] = root * (estimate(y) - phi1);
      });
      const double centre = shift(phi);
      auto scaled = raw;
      for (double& v : scaled) v = (v + centre) / kappa;

      auto push = [&](const std::string& label, const std::string& axis,
                      const std::vector<double>& values) {
        ReportColumn c;
        c.rho = rho;
        c.phi = phi.name();
        c.label = label;
        c.axis = axis;
        c.cdf = cdf_at(EmpiricalCdf(values), report.probes);
        c.se = binomial_se(c.cdf, values.size());
        c.reps = values.size();
        report.columns.push_back(std::move(c));
      };
      push(sample_size_label(cfg.n), "raw", raw);
      push(sample_size_label(cfg.n), "scaled", scaled);

      if (auto law = law_for(phi, sigma)) {
        BmGrid grid = default_grid(*law);
        grid.step = cfg.limit_step;
        const std::uint64_t lseed =
            derive_seed(cfg.seed, hash_combine(cell_stream_id(rho, phi.name(), 0), 0x4C494D4954ULL));
        SamplerOptions opts;
        opts.threads = cfg.threads;
        const LimitSample sample = sample_limit(*law, cfg.limit_reps, grid, lseed, opts);
        auto lscaled = sample.values;
        for (double& v : lscaled) v = (v + centre) / kappa;
        push("n=inf", "raw", sample.values);
        push("n=inf", "scaled", lscaled);

        nlohmann::json entry = limit_provenance(sample);
        entry["rho"] = rho;
        entry["phi"] = phi.name();
        entry["kappa"] = kappa;
        entry["shift"] = centre;
        limits.push_back(std::move(entry));
      }
    }
  }
  report.provenance["limits"] = std::move(limits);
  return report;
}

}  // namespace

ReplicationReport run_interior(const ExperimentConfig& cfg, const QuantileTable& chernoff) {
  cfg.validate(TableKind::interior);
  if (!std::holds_alternative<ChernoffLaw>(chernoff.law)) {
    throw std::invalid_argument("run_interior needs a Chernoff quantile table");
  }
  ReplicationReport report;
  report.kind = TableKind::interior;
  report.ps = cfg.resolved_probes(TableKind::interior);
  for (double p : report.ps) {
    try {
      report.probes.push_back(chernoff.at(p));
    } catch (const std::out_of_range&) {
      throw std::invalid_argument("missing Chernoff quantile for p=" + std::to_string(p));
    }
    report.se.push_back(standard_error(p, cfg.reps));
  }
  report.provenance = base_provenance(cfg, TableKind::interior);
  report.provenance["chernoff"] = to_json(chernoff);

  // Evaluation points: the configured t0 columns followed by the sweep.
  std::vector<double> points = cfg.t0s;
  const std::size_t n_cols = points.size();
  for (std::size_t i = 0; i < cfg.sweep_points; ++i) {
    points.push_back(1.0 / 3.0 + (1.0 / 3.0) * static_cast<double>(i) /
                                     static_cast<double>(cfg.sweep_points - 1));
  }
  const std::size_t width = points.size();

  for (const auto& phi_name : cfg.phis) {
    const TrendFunction phi = TrendFunction::from_name(phi_name);
    for (double rho : cfg.rhos) {
      const double sigma = std::sqrt(long_run_variance_ar1(Ar1Spec{rho, cfg.marginal_sd, 0, 0}));
      const auto rows = simulate_cell(cfg, rho, phi, width, [&](std::span<const double> y,
                                                                std::span<double> out) {
        const TrendFit fit = isotonic_trend(y);
        for (std::size_t j = 0; j < width; ++j) {
          out[j] = *xi_statistic(fit, phi, points[j], sigma).scaled;
        }
      });

      std::vector<std::vector<double>> cdfs(width);
      for (std::size_t j = 0; j < width; ++j) {
        cdfs[j] = cdf_at(EmpiricalCdf(column_of(rows, width, j)), report.probes);
      }
      for (std::size_t j = 0; j < n_cols; ++j) {
        report.columns.push_back({rho, phi.name(), t0_label(points[j]), "scaled", cdfs[j], {},
                                  cfg.reps});
      }
      ReportColumn lo{rho, phi.name(), "min", "scaled", cdfs[n_cols], {}, cfg.reps};
      ReportColumn hi{rho, phi.name(), "max", "scaled", cdfs[n_cols], {}, cfg.reps};
      for (std::size_t j = n_cols + 1; j < width; ++j) {
        for (std::size_t k = 0; k < report.probes.size(); ++k) {
          lo.cdf[k] = std::min(lo.cdf[k], cdfs[j][k]);
          hi.cdf[k] = std::max(hi.cdf[k], cdfs[j][k]);
        }
      }
      report.columns.push_back(std::move(lo));
      report.columns.push_back(std::move(hi));
    }
  }
  return report;
}

ReplicationReport run_boundary(const ExperimentConfig& cfg) {
  cfg.validate(TableKind::boundary);
  BoundarySpec spec;
  if (cfg.ell) spec.ell = *cfg.ell;
  spec.m = cfg.m;
  const std::size_t m = spec.m_for(cfg.n);
  const double n23 = std::cbrt(static_cast<double>(cfg.n) * static_cast<double>(cfg.n));
  // The limit law is indexed by ell; an explicit m maps to ell = (n - m) / n^(2/3).
  const double ell = cfg.ell ? *cfg.ell : static_cast<double>(cfg.n - m) / n23;

  auto report = run_last_point(
      cfg, TableKind::boundary,
      [&](std::span<const double> y) { return isotonic_trend(y).at(m); },
      [&](const TrendFunction& phi, double sigma) -> std::optional<LimitLaw> {
        if (!(ell > 0.0)) return std::nullopt;
        return BoundaryLaw{ell, phi.derivative(1.0), sigma};
      },
      [&](const TrendFunction& phi) { return ell * phi.derivative(1.0); });
  report.provenance["m"] = m;
  report.provenance["ell_effective"] = ell;
  return report;
}

ReplicationReport run_penalized(const ExperimentConfig& cfg) {
  cfg.validate(TableKind::penalized);
  PenaltySpec spec;
  if (cfg.alpha) spec.alpha = *cfg.alpha;
  spec.lambda = cfg.lambda;
  const double lambda = spec.lambda_for(cfg.n);
  // An explicit lambda maps to alpha = lambda / n^(1/3) for the limit law.
  const double alpha = cfg.alpha ? *cfg.alpha : lambda / std::cbrt(static_cast<double>(cfg.n));

  auto report = run_last_point(
      cfg, TableKind::penalized,
      [&](std::span<const double> y) { return penalized_last(y, spec); },
      [&](const TrendFunction& phi, double sigma) -> std::optional<LimitLaw> {
        if (!(alpha > 0.0) || !(phi(1.0) > 0.0)) return std::nullopt;
        return PenalizedLaw{alpha, phi(1.0), phi.derivative(1.0), sigma};
      },
      [](const TrendFunction&) { return 0.0; });
  report.provenance["lambda"] = lambda;
  report.provenance["alpha_effective"] = alpha;
  return report;
}

}  // namespace mtrend
