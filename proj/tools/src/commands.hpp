#pragma once

// Subcommand implementations behind the mtrend executable. Each returns the
// files it wrote so callers (and tests) can inspect them.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mtrend/estimators.hpp"
#include "mtrend/harness.hpp"
#include "mtrend/limits.hpp"
#include "mtrend/stochastic.hpp"

namespace mtrend::cli {

enum class Format { csv, json, both };
Format parse_format(std::string_view name);

/// {"tool","version","command","seed","config","config_hash"}
nlohmann::json provenance(std::string_view command, std::uint64_t seed,
                          const nlohmann::json& config);
/// '#'-prefixed single line form of provenance(), terminated by '\n'.
std::string provenance_comment(const nlohmann::json& prov);

struct FitOptions {
  std::optional<double> alpha;
  std::optional<double> lambda;
  std::optional<double> ell;
  std::optional<std::size_t> m;
  std::optional<std::size_t> max_lag;  ///< default floor(n / 4)

  nlohmann::json to_json() const;
};

struct FitResult {
  TimeSeries input;
  TrendFit fit;
  double lambda = 0.0;
  PenalizedEstimate penalized;
  std::optional<std::size_t> boundary_m;
  std::optional<double> boundary;
  std::vector<double> residuals;
  AcfResult acf;
  std::vector<std::string> notes;
};

/// Without explicit --ell/--m the boundary estimate is skipped (with a note)
/// when the series is too short for the default ell.
FitResult run_fit(TimeSeries input, const FitOptions& opts);
std::vector<std::filesystem::path> write_fit(const FitResult& result, const FitOptions& opts,
                                             const std::filesystem::path& out_dir, Format fmt);

struct SimulateOptions {
  std::size_t n = 150;
  std::string phi = "identity";
  Ar1Spec ar{0.5, 0.25, 20100101, 0};

  nlohmann::json to_json() const;
};

void write_simulation(const SyntheticSeries& s, const SimulateOptions& opts, Format fmt,
                      std::ostream& os);

struct LimitsOptions {
  std::string law = "chernoff";
  std::size_t reps = 10000;
  std::uint64_t seed = 20100101;
  std::optional<double> step;
  std::optional<double> lower;
  std::optional<double> upper;
  double sigma = 1.0;
  double phi1 = 1.0;
  double phi1_prime = 1.0;
  std::optional<double> ell;
  std::optional<double> alpha;
  std::vector<double> ps;  ///< default: the 15 table percentiles
  std::filesystem::path cache_dir = ".mtrend-cache";
  bool fresh = false;
  unsigned threads = 0;

  LimitLaw law_params() const;
  BmGrid grid() const;
};

struct LimitsOutcome {
  QuantileTable table;
  bool cache_hit = false;
  std::filesystem::path cache_path;
};

LimitsOutcome run_limits(const LimitsOptions& opts);

struct TablesOptions {
  TableKind which = TableKind::interior;
  ExperimentConfig config;
  std::size_t chernoff_reps = 1000000;  ///< interior probes
  std::filesystem::path cache_dir = ".mtrend-cache";
  bool fresh = false;
  std::filesystem::path out_dir = ".";
  Format format = Format::both;
};

/// Runs the harness and writes the table files; progress goes to `log`.
std::vector<std::filesystem::path> run_tables(const TablesOptions& opts, std::ostream& log);

/// Stem of the per-table output files, e.g. "table2_identity" or "table5".
std::string table_stem(TableKind kind, std::string_view phi = {});

void write_acf(const AcfResult& acf, const nlohmann::json& prov, Format fmt, std::ostream& os);

}  // namespace mtrend::cli
