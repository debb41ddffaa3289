#include "msalab/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "msalab/report.hpp"

namespace msalab::config {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::string& where,
                    const std::set<std::string>& allowed) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw ConfigError(where + "." + it.key() + ": unknown key");
}

template <typename T>
T get_or(const json& j, const std::string& where, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + ": wrong type");
  }
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  reject_unknown(j, "config", {"ensemble", "dynamics", "schedule", "experiment"});

  RunConfig cfg;
  if (j.contains("ensemble")) {
    const auto& je = j["ensemble"];
    reject_unknown(je, "ensemble", {"smoothness", "decay_c", "n_max", "seed"});
    cfg.ensemble.smoothness = get_or(je, "ensemble", "smoothness", 1);
    if (je.contains("decay_c")) cfg.ensemble.decay_c = je["decay_c"].get<double>();
    cfg.ensemble.n_max = get_or(je, "ensemble", "n_max", 40);
    cfg.ensemble.seed = get_or<std::uint64_t>(je, "ensemble", "seed", 1);
    require(cfg.ensemble.smoothness >= 1, "ensemble.smoothness: must be >= 1");
    require(cfg.ensemble.n_max >= 4, "ensemble.n_max: must be >= 4");
  }
  if (j.contains("dynamics")) {
    const auto& jd = j["dynamics"];
    reject_unknown(jd, "dynamics", {"kind", "nu", "d", "frequencies", "cf"});
    cfg.dynamics.kind = get_or<std::string>(jd, "dynamics", "kind", "golden");
    cfg.dynamics.nu = get_or(jd, "dynamics", "nu", 1);
    cfg.dynamics.d = get_or(jd, "dynamics", "d", 1);
    require(cfg.dynamics.nu >= 1, "dynamics.nu: must be >= 1");
    require(cfg.dynamics.d >= 1, "dynamics.d: must be >= 1");
    if (jd.contains("frequencies")) {
      std::vector<std::vector<std::string>> fs;
      try {
        fs = jd["frequencies"].get<std::vector<std::vector<std::string>>>();
      } catch (const json::exception&) {
        throw ConfigError("dynamics.frequencies: expect array of arrays of decimal strings");
      }
      require(static_cast<int>(fs.size()) == cfg.dynamics.d,
              "dynamics.frequencies: need d vectors");
      for (const auto& v : fs)
        require(static_cast<int>(v.size()) == cfg.dynamics.nu,
                "dynamics.frequencies: each vector needs nu coordinates");
      cfg.dynamics.frequencies = fs;
    }
    cfg.dynamics.cf = get_or(jd, "dynamics", "cf", std::vector<int>{});
    dynamics::frequency_kind_from_string(cfg.dynamics.kind);  // validates
  }
  if (j.contains("schedule")) {
    const auto& js = j["schedule"];
    reject_unknown(js, "schedule", {"l0", "g", "m"});
    cfg.schedule.l0 = get_or(js, "schedule", "l0", 6);
    cfg.schedule.g = get_or(js, "schedule", "g", 20.0);
    cfg.schedule.m = get_or(js, "schedule", "m", 1.0);
    require(cfg.schedule.l0 > 2, "schedule.l0: must exceed 2");
    require(cfg.schedule.g > 0.0, "schedule.g: must be > 0");
    require(cfg.schedule.m > 0.0, "schedule.m: must be > 0");
  }
  if (j.contains("experiment")) {
    const auto& jx = j["experiment"];
    reject_unknown(jx, "experiment",
                   {"samples", "threads", "k", "cube_radius", "energy",
                    "center_energy", "j", "s_grid", "interval_grid", "g_list",
                    "explicit_energies", "usr_exponent_a", "usr_range", "div_range",
                    "div_trials", "gri_instances", "gri_host_radius",
                    "gri_inner_radius", "hull_grid", "bins", "max_spacing", "count",
                    "dump_spectra", "dump_eigenvectors", "lvb_trials"});
    auto& x = cfg.experiment;
    x.samples = get_or<std::int64_t>(jx, "experiment", "samples", x.samples);
    x.threads = get_or(jx, "experiment", "threads", x.threads);
    x.k = get_or(jx, "experiment", "k", x.k);
    x.cube_radius = get_or(jx, "experiment", "cube_radius", x.cube_radius);
    x.energy = get_or(jx, "experiment", "energy", x.energy);
    x.center_energy = get_or(jx, "experiment", "center_energy", x.center_energy);
    x.j = get_or(jx, "experiment", "j", x.j);
    x.s_grid = get_or(jx, "experiment", "s_grid", x.s_grid);
    x.interval_grid = get_or(jx, "experiment", "interval_grid", x.interval_grid);
    x.g_list = get_or(jx, "experiment", "g_list", x.g_list);
    x.explicit_energies = get_or(jx, "experiment", "explicit_energies", x.explicit_energies);
    x.usr_exponent_a = get_or(jx, "experiment", "usr_exponent_a", x.usr_exponent_a);
    x.usr_range = get_or<std::int64_t>(jx, "experiment", "usr_range", x.usr_range);
    x.div_range = get_or<std::int64_t>(jx, "experiment", "div_range", x.div_range);
    x.div_trials = get_or(jx, "experiment", "div_trials", x.div_trials);
    x.gri_instances = get_or(jx, "experiment", "gri_instances", x.gri_instances);
    x.gri_host_radius = get_or(jx, "experiment", "gri_host_radius", x.gri_host_radius);
    x.gri_inner_radius = get_or(jx, "experiment", "gri_inner_radius", x.gri_inner_radius);
    x.hull_grid = get_or(jx, "experiment", "hull_grid", x.hull_grid);
    x.bins = get_or(jx, "experiment", "bins", x.bins);
    x.max_spacing = get_or(jx, "experiment", "max_spacing", x.max_spacing);
    x.count = get_or(jx, "experiment", "count", x.count);
    x.dump_spectra = get_or(jx, "experiment", "dump_spectra", x.dump_spectra);
    x.dump_eigenvectors = get_or(jx, "experiment", "dump_eigenvectors", x.dump_eigenvectors);
    x.lvb_trials = get_or(jx, "experiment", "lvb_trials", x.lvb_trials);
    require(x.samples >= 1, "experiment.samples: must be >= 1");
    require(x.threads >= 1, "experiment.threads: must be >= 1");
    require(x.k >= 0, "experiment.k: must be >= 0");
    require(x.cube_radius >= 0, "experiment.cube_radius: must be >= 0");
    require(x.j >= 1, "experiment.j: must be >= 1");
    for (double s : x.s_grid) require(s >= 0.0, "experiment.s_grid: entries must be >= 0");
    for (double w : x.interval_grid)
      require(w >= 0.0, "experiment.interval_grid: entries must be >= 0");
    for (double g : x.g_list) require(g >= 0.0, "experiment.g_list: entries must be >= 0");
  }
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

dynamics::FrequencyMatrix build_frequencies(const DynamicsConfig& cfg) {
  if (cfg.frequencies.has_value()) {
    dynamics::FrequencyMatrix f;
    for (const auto& vec : *cfg.frequencies) {
      std::vector<double> coords;
      coords.reserve(vec.size());
      for (const auto& s : vec) {
        try {
          coords.push_back(std::stod(s));
        } catch (const std::exception&) {
          throw ConfigError("dynamics.frequencies: not a decimal number: " + s);
        }
      }
      f.alphas.emplace_back(std::move(coords));
    }
    return f;
  }
  return dynamics::diophantine_frequency(
      dynamics::frequency_kind_from_string(cfg.kind), cfg.nu, cfg.d, cfg.cf);
}

randelette::RandeletteEnsemble build_ensemble(const EnsembleConfig& cfg, int nu) {
  const double c = cfg.decay_c.value_or(randelette::default_decay(cfg.smoothness));
  try {
    return randelette::make_ensemble(cfg.smoothness, c, cfg.n_max, nu);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("ensemble: ") + e.what());
  }
}

std::string resolved_config_json(const RunConfig& cfg) {
  json j;
  j["ensemble"] = {{"smoothness", cfg.ensemble.smoothness},
                   {"decay_c", cfg.ensemble.decay_c.value_or(
                                   randelette::default_decay(cfg.ensemble.smoothness))},
                   {"n_max", cfg.ensemble.n_max},
                   {"seed", cfg.ensemble.seed}};
  const auto freqs = build_frequencies(cfg.dynamics);
  std::vector<std::vector<std::string>> fs;
  for (const auto& a : freqs.alphas) {
    std::vector<std::string> v;
    for (int i = 0; i < a.dim(); ++i) v.push_back(report::fmt_g17(a[i]));
    fs.push_back(v);
  }
  j["dynamics"] = {{"kind", cfg.dynamics.kind},
                   {"nu", cfg.dynamics.nu},
                   {"d", cfg.dynamics.d},
                   {"frequencies", fs}};
  if (!cfg.dynamics.cf.empty()) j["dynamics"]["cf"] = cfg.dynamics.cf;
  j["schedule"] = {{"l0", cfg.schedule.l0}, {"g", cfg.schedule.g}, {"m", cfg.schedule.m}};
  const auto& x = cfg.experiment;
  j["experiment"] = {{"samples", x.samples},
                     {"threads", x.threads},
                     {"k", x.k},
                     {"cube_radius", x.cube_radius},
                     {"energy", x.energy},
                     {"center_energy", x.center_energy},
                     {"j", x.j},
                     {"s_grid", x.s_grid},
                     {"interval_grid", x.interval_grid},
                     {"g_list", x.g_list},
                     {"explicit_energies", x.explicit_energies},
                     {"usr_exponent_a", x.usr_exponent_a},
                     {"usr_range", x.usr_range},
                     {"div_range", x.div_range},
                     {"div_trials", x.div_trials},
                     {"gri_instances", x.gri_instances},
                     {"gri_host_radius", x.gri_host_radius},
                     {"gri_inner_radius", x.gri_inner_radius},
                     {"hull_grid", x.hull_grid},
                     {"bins", x.bins},
                     {"max_spacing", x.max_spacing},
                     {"count", x.count},
                     {"dump_spectra", x.dump_spectra},
                     {"dump_eigenvectors", x.dump_eigenvectors},
                     {"lvb_trials", x.lvb_trials}};
  return j.dump(2);
}

}  // namespace msalab::config
