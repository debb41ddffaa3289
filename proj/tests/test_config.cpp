#include "doctest.h"
#include "msalab/config.hpp"
#include "msalab/report.hpp"

using namespace msalab;
using namespace msalab::config;

TEST_CASE("defaults and a minimal config") {
  const auto cfg = parse_config("{}");
  CHECK(cfg.ensemble.smoothness == 1);
  CHECK(cfg.ensemble.n_max == 40);
  CHECK(cfg.dynamics.kind == "golden");
  CHECK(cfg.schedule.l0 == 6);
  CHECK(cfg.schedule.g == 20.0);
  CHECK(cfg.experiment.samples == 10000);
}

TEST_CASE("unknown keys are rejected with a field path") {
  CHECK_THROWS_WITH_AS(parse_config(R"({"schedule": {"gee": 2}})"),
                       "schedule.gee: unknown key", ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"outputs": {}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"experiment": {"samples": "many"}})"), ConfigError);
}

TEST_CASE("range validation") {
  CHECK_THROWS_WITH_AS(parse_config(R"({"schedule": {"g": -3.0}})"),
                       "schedule.g: must be > 0", ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"schedule": {"l0": 2}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"ensemble": {"smoothness": 0}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"experiment": {"samples": 0}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"experiment": {"g_list": [-1.0]}})"), ConfigError);
  CHECK_NOTHROW(parse_config(R"({"experiment": {"g_list": [0.0, 20.0]}})"));
}

TEST_CASE("frequencies: explicit decimal strings override the kind") {
  const auto cfg = parse_config(
      R"({"dynamics": {"kind": "golden", "nu": 1, "d": 1,
           "frequencies": [["0.41421356237309515"]]}})");
  const auto f = build_frequencies(cfg.dynamics);
  CHECK(f.alphas[0][0] == doctest::Approx(0.41421356237309515).epsilon(1e-16));
  CHECK_THROWS_AS(parse_config(R"({"dynamics": {"frequencies": [["0.5", "0.3"]]}})"),
                  ConfigError);  // nu mismatch
}

TEST_CASE("resolved config is parseable and idempotent") {
  const auto cfg = parse_config(R"({"schedule": {"l0": 6, "g": 20.0, "m": 1.0}})");
  const auto text = resolved_config_json(cfg);
  const auto cfg2 = parse_config(text);
  CHECK(resolved_config_json(cfg2) == text);
  // frequencies materialized with 17 significant digits
  CHECK(text.find("0.61803398874989") != std::string::npos);
}

TEST_CASE("ensemble build honors the decay default and rejects bad decay") {
  const auto cfg = parse_config(R"({"ensemble": {"smoothness": 2}})");
  const auto ens = build_ensemble(cfg.ensemble, 1);
  CHECK(ens.decay_c == doctest::Approx(randelette::default_decay(2)));
  const auto bad = parse_config(R"({"ensemble": {"smoothness": 2, "decay_c": 0.9}})");
  CHECK_THROWS_AS(build_ensemble(bad.ensemble, 1), ConfigError);
}

TEST_CASE("g17 formatting round-trips doubles") {
  for (double v : {0.1, 1.0 / 3.0, 2.5e-300, 6.180339887498949e-1}) {
    const auto s = report::fmt_g17(v);
    CHECK(std::stod(s) == v);
  }
}
