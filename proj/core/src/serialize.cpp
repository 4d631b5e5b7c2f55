#include "mtrend/serialize.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>
#include <stdexcept>

#include "mtrend/errors.hpp"
#include "mtrend/rng.hpp"

#ifndef MTREND_VERSION
#define MTREND_VERSION "0.0.0"
#endif

namespace mtrend {

using nlohmann::json;

std::string version() { return MTREND_VERSION; }

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

json to_json(const BmGrid& grid) {
  return {{"step", grid.step}, {"lower", grid.lower}, {"upper", grid.upper}};
}

BmGrid grid_from_json(const json& j) {
  BmGrid g;
  g.step = j.at("step").get<double>();
  g.lower = j.at("lower").get<double>();
  g.upper = j.at("upper").get<double>();
  g.validate();
  return g;
}

json to_json(const LimitLaw& law) {
  struct Visitor {
    json operator()(const ChernoffLaw&) const { return json::object(); }
    json operator()(const BoundaryLaw& b) const {
      return {{"ell", b.ell}, {"phi1_prime", b.phi1_prime}, {"sigma", b.sigma}};
    }
    json operator()(const PenalizedLaw& p) const {
      return {{"alpha", p.alpha}, {"phi1", p.phi1}, {"phi1_prime", p.phi1_prime},
              {"sigma", p.sigma}};
    }
  };
  return {{"law", law_name(law)}, {"parameters", std::visit(Visitor{}, law)}};
}

LimitLaw law_from_json(const json& j) {
  const auto name = j.at("law").get<std::string>();
  const json& p = j.at("parameters");
  if (name == "chernoff") return ChernoffLaw{};
  if (name == "boundary") {
    return BoundaryLaw{p.at("ell").get<double>(), p.at("phi1_prime").get<double>(),
                       p.at("sigma").get<double>()};
  }
  if (name == "penalized") {
    return PenalizedLaw{p.at("alpha").get<double>(), p.at("phi1").get<double>(),
                        p.at("phi1_prime").get<double>(), p.at("sigma").get<double>()};
  }
  throw std::invalid_argument("unknown limit law '" + name + "'");
}

namespace {

json to_json(const LimitDiagnostics& d) {
  return {{"lower_hit_fraction", d.lower_hit_fraction},
          {"upper_hit_fraction", d.upper_hit_fraction},
          {"widenings", d.widenings},
          {"warning", d.warning},
          {"message", d.message}};
}

LimitDiagnostics diagnostics_from_json(const json& j) {
  LimitDiagnostics d;
  d.lower_hit_fraction = j.at("lower_hit_fraction").get<double>();
  d.upper_hit_fraction = j.at("upper_hit_fraction").get<double>();
  d.widenings = j.at("widenings").get<int>();
  d.warning = j.at("warning").get<bool>();
  d.message = j.at("message").get<std::string>();
  return d;
}

}  // namespace

json limit_provenance(const LimitSample& sample) {
  json j = to_json(sample.law);
  j["grid"] = to_json(sample.grid);
  j["reps"] = sample.reps;
  j["seed"] = sample.seed;
  j["diagnostics"] = to_json(sample.diagnostics);
  return j;
}

json to_json(const QuantileTable& table) {
  json prov = to_json(table.law);
  prov["grid"] = to_json(table.grid);
  prov["reps"] = table.reps;
  prov["seed"] = table.seed;
  prov["diagnostics"] = to_json(table.diagnostics);
  prov["tool"] = "mtrend";
  prov["version"] = version();
  return {{"ps", table.ps}, {"quantiles", table.quantiles}, {"provenance", prov}};
}

QuantileTable quantile_table_from_json(const json& j) {
  QuantileTable t;
  t.ps = j.at("ps").get<std::vector<double>>();
  t.quantiles = j.at("quantiles").get<std::vector<double>>();
  if (t.ps.size() != t.quantiles.size()) {
    throw std::invalid_argument("quantile table: ps and quantiles differ in length");
  }
  const json& prov = j.at("provenance");
  t.law = law_from_json(prov);
  t.grid = grid_from_json(prov.at("grid"));
  t.reps = prov.at("reps").get<std::size_t>();
  t.seed = prov.at("seed").get<std::uint64_t>();
  if (prov.contains("diagnostics")) t.diagnostics = diagnostics_from_json(prov.at("diagnostics"));
  return t;
}

json to_json(const ExperimentConfig& cfg) {
  json j;
  j["n"] = cfg.n;
  j["reps"] = cfg.reps;
  j["rho"] = cfg.rhos;
  j["phi"] = cfg.phis;
  j["marginal_sd"] = cfg.marginal_sd;
  j["seed"] = cfg.seed;
  j["t0"] = cfg.t0s;
  j["sweep_points"] = cfg.sweep_points;
  j["probes"] = cfg.probes;
  j["ell"] = cfg.ell ? json(*cfg.ell) : json(nullptr);
  j["m"] = cfg.m ? json(*cfg.m) : json(nullptr);
  j["alpha"] = cfg.alpha ? json(*cfg.alpha) : json(nullptr);
  j["lambda"] = cfg.lambda ? json(*cfg.lambda) : json(nullptr);
  j["limit_reps"] = cfg.limit_reps;
  j["limit_step"] = cfg.limit_step;
  // threads is deliberately absent: it never changes a result.
  return j;
}

ExperimentConfig experiment_config_from_json(const json& j, ExperimentConfig cfg) {
  static const std::set<std::string> known{
      "n", "reps", "rho", "phi", "marginal_sd", "seed", "t0", "sweep_points", "probes",
      "ell", "m", "alpha", "lambda", "limit_reps", "limit_step", "threads", "which"};
  if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw std::invalid_argument(key + ": unknown config field");
  }
  auto read = [&](const char* key, auto& field) {
    if (!j.contains(key)) return;
    try {
      j.at(key).get_to(field);
    } catch (const json::exception& e) {
      throw std::invalid_argument(std::string(key) + ": " + e.what());
    }
  };
  auto read_opt = [&](const char* key, auto& field) {
    if (!j.contains(key)) return;
    if (j.at(key).is_null()) {
      field.reset();
      return;
    }
    typename std::remove_reference_t<decltype(field)>::value_type v{};
    try {
      j.at(key).get_to(v);
    } catch (const json::exception& e) {
      throw std::invalid_argument(std::string(key) + ": " + e.what());
    }
    field = v;
  };
  read("n", cfg.n);
  read("reps", cfg.reps);
  read("rho", cfg.rhos);
  read("phi", cfg.phis);
  read("marginal_sd", cfg.marginal_sd);
  read("seed", cfg.seed);
  read("t0", cfg.t0s);
  read("sweep_points", cfg.sweep_points);
  read("probes", cfg.probes);
  read_opt("ell", cfg.ell);
  read_opt("m", cfg.m);
  read_opt("alpha", cfg.alpha);
  read_opt("lambda", cfg.lambda);
  read("limit_reps", cfg.limit_reps);
  read("limit_step", cfg.limit_step);
  read("threads", cfg.threads);
  return cfg;
}

json to_json(const ReplicationReport& report) {
  json cols = json::array();
  for (const auto& c : report.columns) {
    json col{{"rho", c.rho}, {"phi", c.phi}, {"label", c.label}, {"axis", c.axis},
             {"cdf", c.cdf}, {"reps", c.reps}};
    if (!c.se.empty()) col["se"] = c.se;
    cols.push_back(std::move(col));
  }
  json j{{"table", std::string(to_string(report.kind))},
         {"probes", report.probes},
         {"columns", std::move(cols)},
         {"provenance", report.provenance}};
  if (report.kind == TableKind::interior) {
    j["ps"] = report.ps;
    j["se"] = report.se;
  }
  return j;
}

namespace {

void write_provenance_line(const ReplicationReport& report, std::ostream& os) {
  os << "# tool=mtrend version=" << version() << " table=" << to_string(report.kind)
     << " seed=" << report.provenance.value("seed", std::uint64_t{0})
     << " config_hash=" << report.provenance.value("config_hash", std::string{}) << '\n';
}

std::string rho_text(double rho) { return "rho=" + format_double(rho); }

}  // namespace

void write_interior_csv(const ReplicationReport& report, const std::string& phi,
                        std::ostream& os) {
  if (report.kind != TableKind::interior) {
    throw std::invalid_argument("write_interior_csv needs an interior report");
  }
  std::vector<const ReportColumn*> cols;
  for (const auto& c : report.columns) {
    if (c.phi == phi) cols.push_back(&c);
  }
  if (cols.empty()) throw std::invalid_argument("report has no columns for trend '" + phi + "'");

  write_provenance_line(report, os);
  os << "p,se,z";
  for (const auto* c : cols) os << ',' << rho_text(c->rho) << ' ' << c->label;
  os << '\n';
  for (std::size_t i = 0; i < report.probes.size(); ++i) {
    os << format_double(report.ps[i]) << ',' << format_double(report.se[i]) << ','
       << format_double(report.probes[i]);
    for (const auto* c : cols) os << ',' << format_double(c->cdf[i]);
    os << '\n';
  }
}

void write_last_point_csv(const ReplicationReport& report, const std::string& axis,
                          std::ostream& os) {
  if (report.kind == TableKind::interior) {
    throw std::invalid_argument("write_last_point_csv needs a boundary or penalized report");
  }
  std::vector<const ReportColumn*> cols;
  for (const auto& c : report.columns) {
    if (c.axis == axis) cols.push_back(&c);
  }
  if (cols.empty()) throw std::invalid_argument("report has no columns on axis '" + axis + "'");

  write_provenance_line(report, os);
  os << "z";
  for (const auto* c : cols) os << ',' << c->phi << ' ' << rho_text(c->rho) << ' ' << c->label;
  os << '\n';
  for (std::size_t i = 0; i < report.probes.size(); ++i) {
    os << format_double(report.probes[i]);
    for (const auto* c : cols) os << ',' << format_double(c->cdf[i]);
    os << '\n';
  }
}

QuantileCache::QuantileCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::string QuantileCache::key(const LimitLaw& law, const BmGrid& grid, std::size_t reps,
                               std::uint64_t seed, std::span<const double> ps) {
  json k = to_json(law);
  k["grid"] = to_json(grid);
  k["reps"] = reps;
  k["seed"] = seed;
  k["ps"] = std::vector<double>(ps.begin(), ps.end());
  return law_name(law) + "-" + hash_hex(fnv1a64(k.dump()));
}

std::filesystem::path QuantileCache::path_for(const std::string& key) const {
  return dir_ / (key + ".json");
}

std::optional<QuantileTable> QuantileCache::load(const std::string& key) const {
  const auto path = path_for(key);
  std::ifstream in(path);
  if (!in) return std::nullopt;
  try {
    return quantile_table_from_json(json::parse(in));
  } catch (const std::exception&) {
    return std::nullopt;  // unreadable entries are recomputed and overwritten
  }
}

std::filesystem::path QuantileCache::store(const std::string& key,
                                           const QuantileTable& table) const {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw IoError("cannot create cache directory " + dir_.string() + ": " + ec.message());
  const auto path = path_for(key);
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << to_json(table).dump(2) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
  return path;
}

}  // namespace mtrend
