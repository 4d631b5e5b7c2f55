#pragma once

// JSON and CSV forms of quantile tables, experiment configurations and
// replication reports. Every emitted document carries a provenance block
// (tool version, seed, configuration hash). JSON objects use sorted keys.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "mtrend/harness.hpp"
#include "mtrend/limits.hpp"

namespace mtrend {

std::string version();
/// 16 lowercase hex digits.
std::string hash_hex(std::uint64_t h);
/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

nlohmann::json to_json(const BmGrid& grid);
BmGrid grid_from_json(const nlohmann::json& j);

/// {"law": name, "parameters": {...}}
nlohmann::json to_json(const LimitLaw& law);
LimitLaw law_from_json(const nlohmann::json& j);

/// Law, grid (as finally used), reps, seed and diagnostics of a sample.
nlohmann::json limit_provenance(const LimitSample& sample);

nlohmann::json to_json(const QuantileTable& table);
QuantileTable quantile_table_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ExperimentConfig& cfg);
/// Fields absent from `j` keep their value in `base`. Unknown keys are rejected.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j,
                                             ExperimentConfig base = {});

nlohmann::json to_json(const ReplicationReport& report);

/// Table-shaped CSV: one row per probe, one column per cell, preceded by a
/// '#' provenance line. Interior reports are written one trend at a time
/// (`phi`); boundary / penalized reports one axis at a time ("raw" or "scaled").
void write_interior_csv(const ReplicationReport& report, const std::string& phi,
                        std::ostream& os);
void write_last_point_csv(const ReplicationReport& report, const std::string& axis,
                          std::ostream& os);

/// On-disk cache of quantile tables keyed by their full provenance.
class QuantileCache {
 public:
  explicit QuantileCache(std::filesystem::path dir);

  static std::string key(const LimitLaw& law, const BmGrid& grid, std::size_t reps,
                         std::uint64_t seed, std::span<const double> ps);

  std::filesystem::path path_for(const std::string& key) const;
  std::optional<QuantileTable> load(const std::string& key) const;
  /// Writes the table under `key`, creating the directory if needed.
  std::filesystem::path store(const std::string& key, const QuantileTable& table) const;

 private:
  std::filesystem::path dir_;
};

}  // namespace mtrend
