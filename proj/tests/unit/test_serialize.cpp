#include <doctest.h>

#include <filesystem>
#include <sstream>
#include <string>

#include "mtrend/serialize.hpp"

using namespace mtrend;
using nlohmann::json;
namespace fs = std::filesystem;

TEST_CASE("number formatting round-trips") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.125, 0.0}) {
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.5) == "0.5");
  CHECK(hash_hex(0xabcULL) == "0000000000000abc");
  CHECK(version() == "0.3.0");
}

TEST_CASE("laws and grids round-trip") {
  const LimitLaw laws[] = {ChernoffLaw{}, BoundaryLaw{1.5, 2.0, 0.433},
                           PenalizedLaw{1.0, 0.9, 2.0, 0.25}};
  for (const auto& law : laws) {
    const LimitLaw back = law_from_json(to_json(law));
    CHECK(to_json(back) == to_json(law));
  }
  const BmGrid g{5e-4, -3.0, 1.25};
  const BmGrid h = grid_from_json(to_json(g));
  CHECK(h.step == g.step);
  CHECK(h.lower == g.lower);
  CHECK(h.upper == g.upper);
  CHECK_THROWS(law_from_json(json{{"law", "weird"}, {"parameters", json::object()}}));
}

TEST_CASE("quantile tables carry provenance and round-trip") {
  const std::vector<double> ps{0.25, 0.5, 0.75};
  const QuantileTable t = chernoff_quantiles(ps, 50, BmGrid{1e-2, -2.5, 2.5}, 5);
  const json j = to_json(t);
  const json& prov = j.at("provenance");
  for (const char* key : {"law", "parameters", "grid", "reps", "seed", "version", "diagnostics"}) {
    CAPTURE(key);
    CHECK(prov.contains(key));
  }
  const QuantileTable back = quantile_table_from_json(j);
  CHECK(back.quantiles == t.quantiles);
  CHECK(back.ps == t.ps);
  CHECK(back.reps == 50);
  CHECK(back.seed == 5);
  CHECK(to_json(back) == j);
}

TEST_CASE("experiment config round-trips and rejects unknown fields") {
  ExperimentConfig cfg;
  cfg.reps = 77;
  cfg.alpha = 1.5;
  cfg.rhos = {0.0, 0.9};
  const ExperimentConfig back = experiment_config_from_json(to_json(cfg));
  CHECK(to_json(back) == to_json(cfg));
  CHECK(back.alpha == 1.5);
  CHECK_FALSE(back.lambda.has_value());

  const ExperimentConfig partial = experiment_config_from_json(json{{"reps", 10}, {"ell", 2.0}});
  CHECK(partial.reps == 10);
  CHECK(partial.n == 150);
  CHECK(partial.ell == 2.0);

  CHECK_THROWS_WITH_AS(experiment_config_from_json(json{{"rhoo", 1}}), doctest::Contains("rhoo"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(experiment_config_from_json(json{{"reps", "many"}}), doctest::Contains("reps"),
                       std::invalid_argument);
}

TEST_CASE("report CSV layout") {
  ExperimentConfig cfg;
  cfg.reps = 40;
  cfg.rhos = {0.5};
  cfg.phis = {"identity"};
  cfg.alpha = 1.0;
  cfg.limit_reps = 40;
  const ReplicationReport r = run_penalized(cfg);

  std::ostringstream raw;
  write_last_point_csv(r, "raw", raw);
  std::istringstream in(raw.str());
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("# tool=mtrend version=0.3.0 table=penalized seed=20100101 config_hash=", 0) == 0);
  std::getline(in, line);
  CHECK(line == "z,identity rho=0.5 n=150,identity rho=0.5 n=inf");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 11);
  CHECK_THROWS(write_last_point_csv(r, "sideways", raw));
  CHECK_THROWS(write_interior_csv(r, "identity", raw));

  const json j = to_json(r);
  CHECK(j.at("table") == "penalized");
  CHECK(j.at("columns").size() == 4);
  CHECK(j.at("provenance").at("config_hash").get<std::string>().size() == 16);
}

TEST_CASE("interior CSV layout") {
  ExperimentConfig cfg;
  cfg.reps = 30;
  cfg.rhos = {0.5, 0.9};
  cfg.phis = {"identity"};
  const QuantileTable q = chernoff_quantiles(table_percentiles(), 200, BmGrid{1e-2, -2.5, 2.5}, 1);
  const ReplicationReport r = run_interior(cfg, q);
  std::ostringstream out;
  write_interior_csv(r, "identity", out);
  std::istringstream in(out.str());
  std::string comment, header;
  std::getline(in, comment);
  std::getline(in, header);
  CHECK(header ==
        "p,se,z,rho=0.5 t0=0.3333,rho=0.5 t0=0.5,rho=0.5 t0=0.6667,rho=0.5 min,rho=0.5 max,"
        "rho=0.9 t0=0.3333,rho=0.9 t0=0.5,rho=0.9 t0=0.6667,rho=0.9 min,rho=0.9 max");
  CHECK_THROWS(write_interior_csv(r, "sqrt", out));
}

TEST_CASE("quantile cache") {
  const fs::path dir = fs::temp_directory_path() / "mtrend_cache_test";
  fs::remove_all(dir);
  const QuantileCache cache(dir);
  const std::vector<double> ps{0.5};
  const BmGrid grid{1e-2, -2.5, 2.5};
  const std::string key = QuantileCache::key(ChernoffLaw{}, grid, 20, 3, ps);
  CHECK(key != QuantileCache::key(ChernoffLaw{}, grid, 21, 3, ps));
  CHECK(key != QuantileCache::key(ChernoffLaw{}, grid, 20, 4, ps));
  CHECK_FALSE(cache.load(key).has_value());
  const QuantileTable t = chernoff_quantiles(ps, 20, grid, 3);
  const fs::path stored = cache.store(key, t);
  CHECK(fs::exists(stored));
  const auto hit = cache.load(key);
  REQUIRE(hit.has_value());
  CHECK(hit->quantiles == t.quantiles);
  fs::remove_all(dir);
}
