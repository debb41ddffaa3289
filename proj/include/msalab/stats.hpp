#pragma once

#include <cstdint>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "msalab/msa.hpp"

namespace msalab::stats {

using dynamics::FrequencyMatrix;
using dynamics::TorusPoint;
using lattice::Cube;
using randelette::RandeletteEnsemble;
using randelette::ThetaSample;

/// Wilson 95% score interval for a binomial proportion.
struct WilsonInterval {
  double p = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

WilsonInterval wilson(std::int64_t count, std::int64_t n, double z = 1.959963984540054);

struct FitResult {
  bool valid = false;
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double slope_ci = 0.0;  // 1.96 * stderr
  int n_points = 0;
};

/// Least squares on (log x, log y).
FitResult fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

struct ScalingPoint {
  double abscissa = 0.0;
  std::int64_t count = 0;
  std::int64_t n = 0;
  WilsonInterval ci;
};

/// Empirical probabilities on a grid plus the log-log slope fitted through the
/// points with at least `min_successes` positive counts (points below are
/// dropped, never imputed).
struct ScalingFit {
  std::vector<ScalingPoint> points;
  FitResult fit;
  int min_successes = 5;
};

ScalingFit make_scaling_fit(const std::vector<double>& grid,
                            const std::vector<std::int64_t>& counts, std::int64_t n,
                            int min_successes = 5);

/// Monte Carlo driver parameters.  Samples are independent tasks; sample i
/// derives all of its randomness from hash_key(seed_base, i, ...), so results
/// are reproducible and identical for any thread count.
struct McParams {
  std::int64_t samples = 10000;
  std::uint64_t seed_base = 1;
  int threads = 1;
};

TorusPoint sample_omega(std::uint64_t seed_base, std::int64_t index, int nu);
ThetaSample sample_theta(std::uint64_t seed_base, std::int64_t index);

/// Maps fn over [0, n) into a pre-sized vector.  threads <= 1 runs the plain
/// serial reference loop; otherwise the iterations are distributed with
/// OpenMP.  Results are stored by index, so the output is identical either
/// way.
template <typename R, typename Fn>
std::vector<R> sample_map(std::int64_t n, int threads, Fn&& fn) {
  std::vector<R> out(static_cast<std::size_t>(n));
  if (threads <= 1) {
    for (std::int64_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = fn(i);
    return out;
  }
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (std::int64_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = fn(i);
#else
  for (std::int64_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = fn(i);
#endif
  return out;
}

struct WegnerParams {
  int cube_radius = 8;
  int d = 1;
  double g = 20.0;
  double energy = 0.0;
  std::vector<double> s_grid;
};

/// P{dist(Sigma(cube), E) <= s} over joint (omega, theta) samples, with the
/// slope of log P in log s.
ScalingFit wegner_scan(const RandeletteEnsemble& ens, const FrequencyMatrix& freqs,
                       const WegnerParams& p, const McParams& mc);

/// Per-sample spectral distances; the shared primitive behind wegner_scan,
/// exposed for paired-g comparisons.
std::vector<double> wegner_distances(const RandeletteEnsemble& ens,
                                     const FrequencyMatrix& freqs,
                                     const WegnerParams& p, const McParams& mc);

struct MinamiParams {
  int cube_radius = 8;
  int d = 1;
  double g = 20.0;
  double center_energy = 12.0;
  int j = 2;
  std::vector<double> interval_grid;
};

/// P{at least J eigenvalues in the centered interval} versus |I|.
ScalingFit minami_scan(const RandeletteEnsemble& ens, const FrequencyMatrix& freqs,
                       const MinamiParams& p, const McParams& mc);

struct SpacingHistogram {
  std::vector<double> edges;  // size bins + 1
  std::vector<double> mass;   // sums to 1 over all nearest-neighbor spacings
  std::int64_t n_samples = 0;
  std::int64_t n_spacings = 0;
  std::int64_t degenerate_samples = 0;  // min spacing <= 1e-12 * spectral scale
  double min_spacing = 0.0;
};

SpacingHistogram spacing_histogram(const RandeletteEnsemble& ens,
                                   const FrequencyMatrix& freqs, int cube_radius,
                                   int d, double g, int bins, double max_spacing,
                                   const McParams& mc);

struct ProbRow {
  double g = 0.0;
  int k = 0;
  std::string event;
  std::int64_t count = 0;
  std::int64_t n = 0;
  WilsonInterval ci;
};

struct TunnelingResult {
  std::vector<ProbRow> rows;                // one per g
  std::vector<std::vector<char>> indicator;  // [g index][sample]
};

/// Frequency of the tunneling classification at level k versus g, on matched
/// per-sample seeds (paired design).
TunnelingResult tunneling_probability(const RandeletteEnsemble& ens,
                                      const FrequencyMatrix& freqs, int l0, int k,
                                      const std::vector<double>& g_list,
                                      const McParams& mc);

struct LocalizationResult {
  std::vector<ProbRow> rows;                 // event = "non_localized", one per g
  std::vector<std::vector<char>> non_localized;  // [g index][sample]
  std::vector<std::vector<double>> mhat;     // fitted decay mass per sample
};

LocalizationResult localization_probability(const RandeletteEnsemble& ens,
                                            const FrequencyMatrix& freqs, int l0,
                                            double m, int k,
                                            const std::vector<double>& g_list,
                                            const McParams& mc);

struct SignTest {
  int wins = 0;
  int losses = 0;
  int ties = 0;
  double p_value = 1.0;  // one-sided binomial, H1: a > b
  bool significant_95 = false;
};

/// Paired one-sided sign test of a > b; ties dropped.
SignTest paired_sign_test(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace msalab::stats
