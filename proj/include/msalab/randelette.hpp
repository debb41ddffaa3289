#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "msalab/dynamics.hpp"
#include "msalab/mother.hpp"

namespace msalab::lattice {
struct Cube;
}

namespace msalab::randelette {

using dynamics::FrequencyMatrix;
using dynamics::TorusPoint;

/// Scaled and shifted copies of the mother on the circle, one family per
/// generation n, tensorized over the nu coordinates:
///   n <= 2 : a single copy whose plateau wraps the whole circle, so the
///            randelette is identically 1 (the generation contributes a global
///            coefficient);
///   n == 3 : two copies with support rescaled to exactly 1, step 1/2 -- the
///            2^n scaling would wrap the circle without vanishing at the seam;
///   n >= 4 : 2^(n-2) copies of Phi(2^n t - 4k), step 4/2^n, support 12/2^n.
/// Every point of the circle lies on the plateau of at least one copy in every
/// generation, and at most 3 supports overlap per coordinate.
struct RandeletteEnsemble {
  MotherFunction mother;
  double decay_c = 0.0;  // generation amplitudes a_n = exp(-c n)
  int n_max = 40;
  int nu = 1;
  int overlap_bound = 3;  // K' = 3^nu for the default geometry

  double amplitude(int n) const;
  /// copies per coordinate in generation n
  std::int64_t copies_1d(int n) const;
  /// total copies K_n = copies_1d^nu
  std::int64_t copies(int n) const;
  /// geometric tail of the truncated expansion:
  /// K' e^{-c (n_max+1)} / (1 - e^{-c})
  double tail_bound() const;
  /// uniform bound on |d v / d omega_i|:
  /// K' sup|Phi'| ( 12 + 2^4 / (1 - e^{-(c - ln 2)}) ) style majorant; see
  /// gradient_bound() for the exact expression used.
  double gradient_bound() const;
};

RandeletteEnsemble make_ensemble(int smoothness, double decay_c, int n_max,
                                 int nu);

/// Default decay rate for a class-M ensemble: (M+1) ln 2 + 1/2.
double default_decay(int smoothness);

/// Lazily generated iid uniform [0,1] coefficients theta_{n,k}, a pure
/// function of (seed, n, k); bit-exact regeneration from the seed.  At most
/// one coefficient may be overridden (the LVB freeze-and-resample experiment).
struct ThetaSample {
  std::uint64_t seed = 0;
  int override_n = -1;
  std::int64_t override_k = -1;
  double override_value = 0.0;
  bool all_zero = false;

  double coeff(int n, std::int64_t k) const;
  ThetaSample with_override(int n, std::int64_t k, double value) const;
  /// The sample with every coefficient 0 (overrides still honored).
  static ThetaSample zeros();
};

/// Value of the k-th generation-n randelette at omega; k is 1-based and flat
/// over the per-coordinate grid (lexicographic).
double randelette_eval(const RandeletteEnsemble& ens, int n, std::int64_t k,
                       const TorusPoint& omega);

/// Number of generation-n supports containing omega (per-coordinate windows
/// are half-open).  Always <= overlap_bound.
int overlap_count(const RandeletteEnsemble& ens, int n, const TorusPoint& omega);

/// 1-based per-coordinate index of a copy whose plateau contains t; one exists
/// at every point by construction.
std::int64_t plateau_covering_index(const RandeletteEnsemble& ens, int n,
                                    double t);

/// Truncated expansion v(omega, theta) = sum_n a_n sum_k theta_{n,k}
/// phi_{n,k}(omega).  Deterministic in (seed, omega); summation order fixed.
double hull_eval(const RandeletteEnsemble& ens, const ThetaSample& theta,
                 const TorusPoint& omega);

/// Analytic gradient of the truncated expansion.
std::vector<double> hull_gradient(const RandeletteEnsemble& ens,
                                  const ThetaSample& theta,
                                  const TorusPoint& omega);

struct SeparationGeneration {
  double a_coef = 0.0;  // A / ln 2
  double b_coef = 0.0;  // A + 5 - ln C / ln 2
  double n_raw = 0.0;   // a ln L + b
  int n_min = 0;        // floor(n_raw) + 1
};

/// Smallest generation from which supports separate all orbit pairs within a
/// radius-L cube, given a USR certificate (A, C).
SeparationGeneration separation_generation(std::int64_t cube_radius, double A,
                                           double C);

/// True iff for every pair x != y in the cube and every generation
/// n in [N, n_max], no single randelette support contains both T^x omega and
/// T^y omega.
bool support_separation_check(const RandeletteEnsemble& ens,
                              const FrequencyMatrix& freqs,
                              const lattice::Cube& cube,
                              const TorusPoint& omega, int N);

struct LvbReport {
  int n_used = 0;            // generation whose coefficient was resampled
  std::int64_t k_star = 0;   // flat index of the plateau copy over T^x omega
  bool frozen_ok = false;    // all other sites bit-identical under resampling
  double slope = 0.0;        // d v(x) / d theta, must equal a_{n_used}
  double slope_expected = 0.0;
  double max_affine_residual = 0.0;
  double density_bound = 0.0;  // 1 / slope = e^{c n_used}
};

/// Freezes every coefficient except the generation-N_min plateau coefficient
/// over T^x omega, resamples it, and verifies that (i) the potential at every
/// other site of the cube is unchanged, (ii) v at x is affine in the
/// coefficient with slope a_{N_min}.  The reciprocal slope bounds the
/// conditional density of v(x) given everything else.
LvbReport lvb_experiment(const RandeletteEnsemble& ens,
                         const FrequencyMatrix& freqs,
                         const lattice::Cube& cube,
                         const std::vector<int>& site, const TorusPoint& omega,
                         int trials, std::uint64_t rng_seed,
                         const dynamics::UsrCertificate& cert);

}  // namespace msalab::randelette
