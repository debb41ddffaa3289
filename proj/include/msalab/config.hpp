#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "msalab/dynamics.hpp"
#include "msalab/randelette.hpp"

namespace msalab::config {

/// Configuration problem; maps to CLI exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EnsembleConfig {
  int smoothness = 1;
  std::optional<double> decay_c;  // default (M+1) ln 2 + 1/2
  int n_max = 40;
  std::uint64_t seed = 1;
};

struct DynamicsConfig {
  std::string kind = "golden";
  int nu = 1;
  int d = 1;
  /// Decimal strings (>= 17 significant digits) per frequency vector, outer
  /// index 0..d-1, inner 0..nu-1.  Overrides `kind` when present.
  std::optional<std::vector<std::vector<std::string>>> frequencies;
  std::vector<int> cf;  // custom continued-fraction coefficients
};

struct ScheduleConfig {
  int l0 = 6;
  double g = 20.0;
  double m = 1.0;
};

struct ExperimentBlock {
  std::int64_t samples = 10000;
  int threads = 1;
  int k = 1;
  int cube_radius = 8;
  double energy = 0.0;
  double center_energy = 12.0;
  int j = 2;
  std::vector<double> s_grid;
  std::vector<double> interval_grid;
  std::vector<double> g_list;
  std::vector<double> explicit_energies;
  double usr_exponent_a = 1.0;
  std::int64_t usr_range = 100000;
  std::int64_t div_range = 50;
  int div_trials = 1000;
  int gri_instances = 100;
  int gri_host_radius = 8;
  int gri_inner_radius = 2;
  int hull_grid = 512;   // omega grid for the hull CSV export
  int bins = 40;         // spacing histogram
  double max_spacing = 2.0;
  int count = 1;         // classify: number of (omega, theta) samples
  bool dump_spectra = false;
  bool dump_eigenvectors = false;
  int lvb_trials = 8;
};

struct RunConfig {
  EnsembleConfig ensemble;
  DynamicsConfig dynamics;
  ScheduleConfig schedule;
  ExperimentBlock experiment;
};

/// Parse and validate; unknown keys and out-of-range values raise ConfigError
/// with the offending field path.
RunConfig parse_config(const std::string& json_text);

RunConfig load_config_file(const std::string& path);

/// Fully-resolved configuration (defaults filled, frequencies materialized as
/// 17-significant-digit decimal strings), stable key order.
std::string resolved_config_json(const RunConfig& cfg);

dynamics::FrequencyMatrix build_frequencies(const DynamicsConfig& cfg);
randelette::RandeletteEnsemble build_ensemble(const EnsembleConfig& cfg, int nu);

}  // namespace msalab::config
