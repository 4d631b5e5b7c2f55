// mtrend: isotonic trend fitting, simulation and limit-law tables.
//
// Exit codes: 0 success, 1 validation error, 2 I/O error, 3 internal error.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "csv_input.hpp"
#include "mtrend/errors.hpp"
#include "mtrend/serialize.hpp"

namespace {

using namespace mtrend;
using namespace mtrend::cli;

constexpr int kValidation = 1;
constexpr int kIo = 2;
constexpr int kInternal = 3;

struct InputFlags {
  std::string path;
  std::optional<std::string> column;
  bool header = false;
  bool no_header = false;

  TimeSeries read() const {
    CsvOptions o;
    o.column = column;
    if (header) o.header = true;
    if (no_header) o.header = false;
    if (path == "-") return read_series_csv(std::cin, o, "<stdin>");
    return read_series_csv(std::filesystem::path(path), o);
  }
};

void add_input_flags(CLI::App* cmd, InputFlags& in) {
  cmd->add_option("input", in.path, "CSV file with the series ('-' for stdin)")->required();
  cmd->add_option("--column", in.column, "value column: header name or 1-based index (default: last)");
  auto* h = cmd->add_flag("--header", in.header, "first data row is a header");
  cmd->add_flag("--no-header", in.no_header, "first data row is data")->excludes(h);
}

std::ostream& open_or_stdout(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw IoError("cannot write " + path);
  return file;
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("config: " + path + ": " + e.what());
  }
}

template <class T>
void override_if(const CLI::Option* opt, T& field, const T& value) {
  if (opt->count() > 0) field = value;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Isotonic trend estimation under dependent noise: fitting, simulation, limit laws"};
  app.set_version_flag("--version", mtrend::version());
  app.require_subcommand(1);

  // fit
  auto* fit = app.add_subcommand("fit", "fit the isotonic trend and last-point estimators to a CSV series");
  InputFlags fit_in;
  FitOptions fit_opts;
  std::string fit_out = ".";
  std::string fit_format = "csv";
  add_input_flags(fit, fit_in);
  auto* fit_alpha = fit->add_option("--alpha", fit_opts.alpha, "penalty scale, lambda = alpha n^(1/3) (default 1)");
  fit->add_option("--lambda", fit_opts.lambda, "penalty, overrides alpha")->excludes(fit_alpha);
  auto* fit_ell = fit->add_option("--ell", fit_opts.ell, "boundary offset scale (default 1)");
  fit->add_option("--m", fit_opts.m, "boundary index, overrides ell")->excludes(fit_ell);
  fit->add_option("--max-lag", fit_opts.max_lag, "largest residual ACF lag (default n/4)");
  fit->add_option("--out", fit_out, "output directory")->capture_default_str();
  fit->add_option("--format", fit_format, "csv, json or both")->capture_default_str();

  // simulate
  auto* sim = app.add_subcommand("simulate", "draw trend + AR(1) series");
  SimulateOptions sim_opts;
  std::string sim_out;
  std::string sim_format = "csv";
  sim->add_option("--n", sim_opts.n, "series length")->capture_default_str();
  sim->add_option("--phi", sim_opts.phi, "trend: sqrt, identity or square")->capture_default_str();
  sim->add_option("--rho", sim_opts.ar.rho, "AR(1) coefficient")->capture_default_str();
  sim->add_option("--sd", sim_opts.ar.marginal_sd, "marginal standard deviation")->capture_default_str();
  sim->add_option("--seed", sim_opts.ar.seed, "master seed")->capture_default_str();
  sim->add_option("--burn-in", sim_opts.ar.burn_in, "extra steps discarded after the stationary start");
  sim->add_option("--out", sim_out, "output file (default stdout)");
  sim->add_option("--format", sim_format, "csv or json")->capture_default_str();

  // limits
  auto* lim = app.add_subcommand("limits", "tabulate quantiles of a limit law");
  LimitsOptions lim_opts;
  std::string lim_out;
  lim->add_option("law", lim_opts.law, "chernoff, boundary or penalized")
      ->required()
      ->check(CLI::IsMember({"chernoff", "boundary", "penalized"}));
  lim->add_option("--reps", lim_opts.reps, "replications")->capture_default_str();
  lim->add_option("--seed", lim_opts.seed, "master seed")->capture_default_str();
  lim->add_option("--step", lim_opts.step, "grid spacing (default 1e-3)");
  lim->add_option("--lower", lim_opts.lower, "left window end");
  lim->add_option("--upper", lim_opts.upper, "right window end");
  lim->add_option("--sigma", lim_opts.sigma, "long-run standard deviation")->capture_default_str();
  lim->add_option("--phi1", lim_opts.phi1, "trend value at 1")->capture_default_str();
  lim->add_option("--phi1-prime", lim_opts.phi1_prime, "trend derivative at 1")->capture_default_str();
  lim->add_option("--ell", lim_opts.ell, "boundary offset (boundary law)");
  lim->add_option("--alpha", lim_opts.alpha, "penalty scale (penalized law)");
  lim->add_option("--ps", lim_opts.ps, "quantile levels (default: the 15 table percentiles)")->delimiter(',');
  lim->add_option("--cache-dir", lim_opts.cache_dir, "quantile cache directory")->capture_default_str();
  lim->add_flag("--fresh", lim_opts.fresh, "ignore cached results");
  lim->add_option("--threads", lim_opts.threads, "worker cap (0 = all cores)");
  lim->add_option("--out", lim_out, "output file (default stdout)");

  // tables
  auto* tab = app.add_subcommand("tables", "replicate the simulation tables");
  TablesOptions tab_opts;
  std::string which;
  std::string config_path;
  std::string tab_format = "both";
  ExperimentConfig flags;
  double f_alpha = 0, f_lambda = 0, f_ell = 0;
  std::size_t f_m = 0;
  tab->add_option("--which", which, "interior, boundary or penalized")->required();
  tab->add_option("--config", config_path, "JSON experiment configuration");
  auto* o_n = tab->add_option("--n", flags.n, "sample size");
  auto* o_reps = tab->add_option("--reps", flags.reps, "replications per cell");
  auto* o_seed = tab->add_option("--seed", flags.seed, "master seed");
  auto* o_rho = tab->add_option("--rho", flags.rhos, "AR(1) coefficients")->delimiter(',');
  auto* o_phi = tab->add_option("--phi", flags.phis, "trends")->delimiter(',');
  auto* o_t0 = tab->add_option("--t0", flags.t0s, "interior points")->delimiter(',');
  auto* o_sd = tab->add_option("--sd", flags.marginal_sd, "marginal standard deviation");
  auto* o_alpha = tab->add_option("--alpha", f_alpha, "penalty scale (penalized)");
  auto* o_lambda = tab->add_option("--lambda", f_lambda, "penalty (penalized)");
  auto* o_ell = tab->add_option("--ell", f_ell, "boundary offset scale (boundary)");
  auto* o_m = tab->add_option("--m", f_m, "boundary index (boundary)");
  auto* o_threads = tab->add_option("--threads", flags.threads, "worker cap (0 = all cores)");
  auto* o_lreps = tab->add_option("--limit-reps", flags.limit_reps, "replications for n=inf columns");
  auto* o_lstep = tab->add_option("--limit-step", flags.limit_step, "Brownian grid spacing");
  tab->add_option("--chernoff-reps", tab_opts.chernoff_reps, "replications for the Chernoff probes")
      ->capture_default_str();
  tab->add_option("--cache-dir", tab_opts.cache_dir, "quantile cache directory")->capture_default_str();
  tab->add_flag("--fresh", tab_opts.fresh, "ignore cached quantiles");
  tab->add_option("--out", tab_opts.out_dir, "output directory")->capture_default_str();
  tab->add_option("--format", tab_format, "csv, json or both")->capture_default_str();

  // acf
  auto* acf_cmd = app.add_subcommand("acf", "sample autocorrelation of a CSV series");
  InputFlags acf_in;
  std::optional<std::size_t> acf_lag;
  std::string acf_out;
  std::string acf_format = "csv";
  add_input_flags(acf_cmd, acf_in);
  acf_cmd->add_option("--max-lag", acf_lag, "largest lag (default n/4)");
  acf_cmd->add_option("--out", acf_out, "output file (default stdout)");
  acf_cmd->add_option("--format", acf_format, "csv or json")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kValidation;
  }

  try {
    if (fit->parsed()) {
      const auto fmt = parse_format(fit_format);
      auto result = run_fit(fit_in.read(), fit_opts);
      for (const auto& note : result.notes) std::cerr << "note: " << note << '\n';
      for (const auto& p : write_fit(result, fit_opts, fit_out, fmt)) std::cout << "wrote " << p.string() << '\n';
    } else if (sim->parsed()) {
      const auto fmt = parse_format(sim_format);
      const auto phi = TrendFunction::from_name(sim_opts.phi);
      if (sim_opts.n < 1) throw std::invalid_argument("n: must be at least 1");
      const auto series = synthesize(sim_opts.n, phi, sim_opts.ar);
      std::ofstream file;
      write_simulation(series, sim_opts, fmt, open_or_stdout(sim_out, file));
    } else if (lim->parsed()) {
      const auto outcome = run_limits(lim_opts);
      std::cerr << (outcome.cache_hit ? "cache hit: " : "cache miss, stored: ")
                << outcome.cache_path.string() << '\n';
      if (outcome.table.diagnostics.warning) std::cerr << "warning: " << outcome.table.diagnostics.message << '\n';
      std::ofstream file;
      open_or_stdout(lim_out, file) << to_json(outcome.table).dump(2) << '\n';
    } else if (tab->parsed()) {
      tab_opts.which = table_kind_from_string(which);
      tab_opts.format = parse_format(tab_format);
      ExperimentConfig cfg;
      if (!config_path.empty()) cfg = experiment_config_from_json(read_json_file(config_path));
      override_if(o_n, cfg.n, flags.n);
      override_if(o_reps, cfg.reps, flags.reps);
      override_if(o_seed, cfg.seed, flags.seed);
      override_if(o_rho, cfg.rhos, flags.rhos);
      override_if(o_phi, cfg.phis, flags.phis);
      override_if(o_t0, cfg.t0s, flags.t0s);
      override_if(o_sd, cfg.marginal_sd, flags.marginal_sd);
      override_if(o_threads, cfg.threads, flags.threads);
      override_if(o_lreps, cfg.limit_reps, flags.limit_reps);
      override_if(o_lstep, cfg.limit_step, flags.limit_step);
      if (o_alpha->count()) cfg.alpha = f_alpha, cfg.lambda.reset();
      if (o_lambda->count()) cfg.lambda = f_lambda, cfg.alpha.reset();
      if (o_alpha->count() && o_lambda->count()) throw std::invalid_argument("alpha: give either --alpha or --lambda");
      if (o_ell->count()) cfg.ell = f_ell, cfg.m.reset();
      if (o_m->count()) cfg.m = f_m, cfg.ell.reset();
      if (o_ell->count() && o_m->count()) throw std::invalid_argument("ell: give either --ell or --m");
      tab_opts.config = cfg;
      try {
        tab_opts.config.validate(tab_opts.which);
      } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(std::string("--") + e.what());
      }
      run_tables(tab_opts, std::cout);
    } else if (acf_cmd->parsed()) {
      const auto fmt = parse_format(acf_format);
      const auto series = acf_in.read();
      const std::size_t lag = acf_lag.value_or(series.size() / 4);
      const auto result = acf(series.values, lag);
      std::ofstream file;
      write_acf(result, provenance("acf", 0, {{"max_lag", lag}, {"n", series.size()}}), fmt,
                open_or_stdout(acf_out, file));
    }
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: config: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return 0;
}
