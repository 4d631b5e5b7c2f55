#include "commands.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "mtrend/errors.hpp"
#include "mtrend/rng.hpp"
#include "mtrend/serialize.hpp"

namespace mtrend::cli {

using nlohmann::json;
namespace fs = std::filesystem;

Format parse_format(std::string_view name) {
  if (name == "csv") return Format::csv;
  if (name == "json") return Format::json;
  if (name == "both") return Format::both;
  throw std::invalid_argument("format: expected csv, json or both, got '" + std::string(name) + "'");
}

json provenance(std::string_view command, std::uint64_t seed, const json& config) {
  return {{"tool", "mtrend"},
          {"version", version()},
          {"command", std::string(command)},
          {"seed", seed},
          {"config", config},
          {"config_hash", hash_hex(fnv1a64(config.dump()))}};
}

std::string provenance_comment(const json& prov) {
  std::string line = "# tool=mtrend version=" + version();
  if (prov.contains("command")) line += " command=" + prov["command"].get<std::string>();
  if (prov.contains("table")) line += " table=" + prov["table"].get<std::string>();
  line += " seed=" + std::to_string(prov.value("seed", std::uint64_t{0}));
  line += " config_hash=" + prov.value("config_hash", std::string{});
  return line + '\n';
}

namespace {

bool wants_csv(Format f) { return f != Format::json; }
bool wants_json(Format f) { return f != Format::csv; }

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

void ensure_dir(const fs::path& dir) {
  if (dir.empty()) return;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

json optional_json(const auto& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

// ---- fit ------------------------------------------------------------------

json FitOptions::to_json() const {
  return {{"alpha", optional_json(alpha)}, {"lambda", optional_json(lambda)},
          {"ell", optional_json(ell)},     {"m", optional_json(m)},
          {"max_lag", optional_json(max_lag)}};
}

FitResult run_fit(TimeSeries input, const FitOptions& opts) {
  const std::size_t n = input.size();
  if (n == 0) throw std::invalid_argument("input: empty series");
  if (opts.alpha && opts.lambda) throw std::invalid_argument("alpha: give either alpha or lambda");
  if (opts.ell && opts.m) throw std::invalid_argument("ell: give either ell or m");

  FitResult r;
  r.fit = isotonic_trend(input.values);

  PenaltySpec penalty;
  if (opts.alpha) penalty.alpha = *opts.alpha;
  penalty.lambda = opts.lambda;
  r.lambda = penalty.lambda_for(n);
  r.penalized = penalized_last_detail(input.values, penalty);

  BoundarySpec boundary;
  if (opts.ell) boundary.ell = *opts.ell;
  boundary.m = opts.m;
  if (opts.ell || opts.m) {
    r.boundary_m = boundary.m_for(n);
  } else {
    try {
      r.boundary_m = boundary.m_for(n);
    } catch (const std::out_of_range&) {
      r.notes.push_back("boundary estimate skipped: series too short for ell=1");
    }
  }
  if (r.boundary_m) {
    r.boundary = r.fit.at(*r.boundary_m);
  }

  r.residuals.resize(n);
  for (std::size_t i = 0; i < n; ++i) r.residuals[i] = input.values[i] - r.fit.mu_tilde[i];

  const std::size_t max_lag = opts.max_lag.value_or(n / 4);
  if (max_lag >= n) throw std::invalid_argument("max_lag: must be below the series length");
  const auto [lo, hi] = std::minmax_element(r.residuals.begin(), r.residuals.end());
  if (*lo == *hi) {
    r.notes.push_back("residual ACF skipped: residuals are constant");
  } else {
    r.acf = acf(r.residuals, max_lag);
  }
  r.input = std::move(input);
  return r;
}

std::vector<fs::path> write_fit(const FitResult& r, const FitOptions& opts, const fs::path& out_dir,
                                Format fmt) {
  ensure_dir(out_dir);
  const std::size_t n = r.input.size();
  json config = opts.to_json();
  config["n"] = n;
  const json prov = provenance("fit", 0, config);
  const auto label = [&](std::size_t i) { return r.input.labels.empty() ? std::string{} : r.input.labels[i]; };

  json steps = json::array();
  for (std::size_t b = 1; b < r.fit.knots.size(); ++b) {
    const double level = r.fit.mu_tilde[r.fit.knots[b] - 1];
    steps.push_back({static_cast<double>(r.fit.knots[b - 1]) / static_cast<double>(n), level});
    steps.push_back({static_cast<double>(r.fit.knots[b]) / static_cast<double>(n), level});
  }

  json summary{{"n", n},
               {"knots", r.fit.knots},
               {"lambda", r.lambda},
               {"penalized", r.penalized.value},
               {"penalized_start", r.penalized.start},
               {"boundary", optional_json(r.boundary)},
               {"boundary_m", optional_json(r.boundary_m)},
               {"mu_tilde_last", r.fit.mu_tilde.back()},
               {"notes", r.notes},
               {"provenance", prov}};

  std::vector<fs::path> written;
  if (wants_csv(fmt)) {
    const auto fit_path = out_dir / "fit.csv";
    auto out = open_out(fit_path);
    out << provenance_comment(prov) << "label,index,value,mu_tilde,residual\n";
    for (std::size_t i = 0; i < n; ++i) {
      out << label(i) << ',' << i + 1 << ',' << format_double(r.input.values[i]) << ','
          << format_double(r.fit.mu_tilde[i]) << ',' << format_double(r.residuals[i]) << '\n';
    }
    finish(out, fit_path);
    written.push_back(fit_path);

    const auto steps_path = out_dir / "steps.csv";
    auto so = open_out(steps_path);
    so << provenance_comment(prov) << "t,mu_tilde\n";
    for (const auto& p : steps) so << format_double(p[0]) << ',' << format_double(p[1]) << '\n';
    finish(so, steps_path);
    written.push_back(steps_path);

    const auto acf_path = out_dir / "acf.csv";
    auto ao = open_out(acf_path);
    write_acf(r.acf, prov, Format::csv, ao);
    finish(ao, acf_path);
    written.push_back(acf_path);

    const auto summary_path = out_dir / "summary.json";
    auto jo = open_out(summary_path);
    jo << summary.dump(2) << '\n';
    finish(jo, summary_path);
    written.push_back(summary_path);
  }
  if (wants_json(fmt)) {
    json full = summary;
    full["label"] = r.input.labels;
    full["value"] = r.input.values;
    full["mu_tilde"] = r.fit.mu_tilde;
    full["residual"] = r.residuals;
    full["steps"] = steps;
    full["acf"] = {{"lag", r.acf.lags}, {"value", r.acf.values}};
    const auto path = out_dir / "fit.json";
    auto out = open_out(path);
    out << full.dump(2) << '\n';
    finish(out, path);
    written.push_back(path);
  }
  return written;
}

void write_acf(const AcfResult& a, const json& prov, Format fmt, std::ostream& os) {
  if (fmt == Format::json) {
    os << json{{"lag", a.lags}, {"value", a.values}, {"provenance", prov}}.dump(2) << '\n';
    return;
  }
  os << provenance_comment(prov) << "lag,acf\n";
  for (std::size_t i = 0; i < a.lags.size(); ++i) {
    os << a.lags[i] << ',' << format_double(a.values[i]) << '\n';
  }
}

// ---- simulate ---------------------------------------------------------------

json SimulateOptions::to_json() const {
  return {{"n", n}, {"phi", phi}, {"rho", ar.rho}, {"marginal_sd", ar.marginal_sd},
          {"burn_in", ar.burn_in}};
}

void write_simulation(const SyntheticSeries& s, const SimulateOptions& opts, Format fmt,
                      std::ostream& os) {
  const json prov = provenance("simulate", opts.ar.seed, opts.to_json());
  if (fmt == Format::json) {
    os << json{{"value", s.values}, {"trend", s.trend}, {"noise", s.noise}, {"provenance", prov}}
              .dump(2)
       << '\n';
    return;
  }
  os << provenance_comment(prov) << "k,t,trend,noise,value\n";
  const double n = static_cast<double>(s.values.size());
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    os << i + 1 << ',' << format_double(static_cast<double>(i + 1) / n) << ','
       << format_double(s.trend[i]) << ',' << format_double(s.noise[i]) << ','
       << format_double(s.values[i]) << '\n';
  }
}

// ---- limits -----------------------------------------------------------------

LimitLaw LimitsOptions::law_params() const {
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma: must be positive");
  if (!(phi1_prime > 0.0)) throw std::invalid_argument("phi1-prime: must be positive");
  if (law == "chernoff") return ChernoffLaw{};
  if (law == "boundary") {
    if (!ell) throw std::invalid_argument("ell: required for the boundary law");
    if (!(*ell > 0.0)) throw std::invalid_argument("ell: must be positive");
    return BoundaryLaw{*ell, phi1_prime, sigma};
  }
  if (law == "penalized") {
    if (!alpha) throw std::invalid_argument("alpha: required for the penalized law");
    if (!(*alpha > 0.0)) throw std::invalid_argument("alpha: must be positive");
    return PenalizedLaw{*alpha, phi1, phi1_prime, sigma};
  }
  throw std::invalid_argument("law: expected chernoff, boundary or penalized, got '" + law + "'");
}

BmGrid LimitsOptions::grid() const {
  BmGrid g = default_grid(law_params());
  if (step) g.step = *step;
  if (lower) g.lower = *lower;
  if (upper) g.upper = *upper;
  g.validate();
  return g;
}

LimitsOutcome run_limits(const LimitsOptions& opts) {
  if (opts.reps < 1) throw std::invalid_argument("reps: must be at least 1");
  const LimitLaw law = opts.law_params();
  const BmGrid grid = opts.grid();
  const std::vector<double> ps = opts.ps.empty() ? table_percentiles() : opts.ps;

  const QuantileCache cache(opts.cache_dir);
  const auto key = QuantileCache::key(law, grid, opts.reps, opts.seed, ps);
  LimitsOutcome out;
  out.cache_path = cache.path_for(key);
  if (!opts.fresh) {
    if (auto hit = cache.load(key)) {
      out.table = std::move(*hit);
      out.cache_hit = true;
      return out;
    }
  }
  SamplerOptions so;
  so.threads = opts.threads;
  out.table = quantile_table(sample_limit(law, opts.reps, grid, opts.seed, so), ps);
  out.cache_path = cache.store(key, out.table);
  return out;
}

// ---- tables -----------------------------------------------------------------

std::string table_stem(TableKind kind, std::string_view phi) {
  switch (kind) {
    case TableKind::interior:
      if (phi.empty()) return "interior";
      if (phi == "square") return "table1_square";
      if (phi == "identity") return "table2_identity";
      if (phi == "sqrt") return "table3_sqrt";
      return "interior_" + std::string(phi);
    case TableKind::boundary:
      return "table4";
    case TableKind::penalized:
      return "table5";
  }
  return "table";
}

std::vector<fs::path> run_tables(const TablesOptions& opts, std::ostream& log) {
  const ExperimentConfig& cfg = opts.config;
  cfg.validate(opts.which);

  ReplicationReport report;
  switch (opts.which) {
    case TableKind::interior: {
      LimitsOptions lo;
      lo.law = "chernoff";
      lo.reps = opts.chernoff_reps;
      lo.seed = derive_seed(cfg.seed, fnv1a64("chernoff"));
      lo.step = cfg.limit_step;
      lo.ps = cfg.resolved_probes(TableKind::interior);
      lo.cache_dir = opts.cache_dir;
      lo.fresh = opts.fresh;
      lo.threads = cfg.threads;
      const auto q = run_limits(lo);
      log << (q.cache_hit ? "cache hit: " : "cache miss, stored: ") << q.cache_path.string() << '\n';
      report = run_interior(cfg, q.table);
      break;
    }
    case TableKind::boundary:
      report = run_boundary(cfg);
      break;
    case TableKind::penalized:
      report = run_penalized(cfg);
      break;
  }

  ensure_dir(opts.out_dir);
  std::vector<fs::path> written;
  if (wants_csv(opts.format)) {
    if (opts.which == TableKind::interior) {
      for (const auto& phi : cfg.phis) {
        const auto path = opts.out_dir / (table_stem(opts.which, phi) + ".csv");
        auto out = open_out(path);
        write_interior_csv(report, phi, out);
        finish(out, path);
        written.push_back(path);
      }
    } else {
      for (const char* axis : {"raw", "scaled"}) {
        const auto path = opts.out_dir / (table_stem(opts.which) + "_" + axis + ".csv");
        auto out = open_out(path);
        write_last_point_csv(report, axis, out);
        finish(out, path);
        written.push_back(path);
      }
    }
  }
  if (wants_json(opts.format)) {
    const auto path = opts.out_dir / (table_stem(opts.which) + ".json");
    auto out = open_out(path);
    out << to_json(report).dump(2) << '\n';
    finish(out, path);
    written.push_back(path);
  }
  for (const auto& p : written) log << "wrote " << p.string() << '\n';
  return written;
}

}  // namespace mtrend::cli
