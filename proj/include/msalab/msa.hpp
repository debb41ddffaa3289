#pragma once

#include <map>
#include <optional>
#include <vector>

#include "msalab/lattice.hpp"
#include "msalab/spectral.hpp"

namespace msalab::msa {

using dynamics::FrequencyMatrix;
using dynamics::TorusPoint;
using lattice::Cube;
using lattice::ScaleSchedule;
using lattice::Site;
using randelette::RandeletteEnsemble;
using randelette::ThetaSample;
using spectral::SpectralData;

/// Scale-level classification parameters.  Resonance checks at level k use the
/// width g delta_k and sub-cube radii in [L_{k-1}, L_k]; singularity uses the
/// decay threshold exp(-gamma(m, L_k) L_k) with core radius L_{k-1}.
struct ClassificationConfig {
  ScaleSchedule sched;
  double m = 1.0;
  int k = 0;
  int center_step = 1;  // sub-cube center grid; 1 = exhaustive

  ClassificationConfig at_level(int level) const {
    ClassificationConfig c = *this;
    c.k = level;
    return c;
  }
};

/// Per-(host, omega, theta) cache of potential values and sub-cube spectra.
/// Sub-cube Hamiltonians share the host's potential, so each spectrum is
/// computed once and reused across energies and classifiers.  Not thread-safe;
/// samples own their state.
class CubeState {
 public:
  CubeState(Cube host, TorusPoint omega, ThetaSample theta, double g,
            const RandeletteEnsemble* ens, const FrequencyMatrix* freqs);

  double potential(const Site& x);
  const SpectralData& spectrum_of(const Cube& c);
  const Cube& host() const { return host_; }
  double coupling() const { return g_; }

 private:
  Cube host_;
  TorusPoint omega_;
  ThetaSample theta_;
  double g_;
  const RandeletteEnsemble* ens_;
  const FrequencyMatrix* freqs_;
  std::map<Site, double> pot_;
  std::map<std::pair<Site, int>, SpectralData> spectra_;
};

/// Resonant iff dist(Sigma, E) < g delta_k; ties count as non-resonant.
bool is_resonant(const SpectralData& spec, double energy, const ScaleSchedule& sched,
                 int k);

/// All sub-cubes scanned by the completely-non-resonant check: radii from
/// max(L_{k-1}, 0) to min(L_k, host radius), centers on the step grid, the
/// host included.
std::vector<Cube> resonance_candidates(const Cube& host,
                                       const ClassificationConfig& cfg);

bool is_cnr(const Cube& host, double energy, const ClassificationConfig& cfg,
            CubeState& state);

struct NsVerdict {
  bool ns = false;
  double lhs = 0.0;  // max over core sites of the boundary-pair Green sum
  double threshold = 0.0;
};

/// Non-singularity: max_{|x-u| <= L_{k-1}} sum over boundary pairs (y, y') of
/// |G(x, y; E)| <= exp(-gamma(m, L_k) L_k), the Green argument running over
/// the inner member of each pair.
NsVerdict is_ns(const SpectralData& spec, const Cube& cube, double energy,
                const ClassificationConfig& cfg);

/// min_{i,j} |lambda_i - mu_j|: some E makes both cubes resonant iff the gap
/// is at most twice the resonance width (take the midpoint).
double pair_resonance_gap(const SpectralData& a, const SpectralData& b);

/// Some E within `width` (closed) of every spectrum in the family, or nullopt.
/// The feasible set is a finite union of closed intervals, so probing the
/// endpoints lambda +- width decides existence exactly.
std::optional<double> common_resonance_energy(
    const std::vector<const SpectralData*>& family, double width);

struct TunnelingVerdict {
  bool tunneling = false;
  std::optional<Cube> witness_a;
  std::optional<Cube> witness_b;
  double best_gap = 0.0;
  double threshold = 0.0;  // 2 g delta_k
};

/// Two disjoint partially-resonant sub-cubes at a common energy, reduced
/// exactly to a spectral-gap test over disjoint candidate pairs.  Requires
/// ceil(L_k^{1/4}) <= L_{k-1} (true for every schedule this recursion
/// produces), so a resonant candidate is itself a valid PR witness.
TunnelingVerdict is_tunneling(const Cube& host, const ClassificationConfig& cfg,
                              CubeState& state);

struct MultiResonanceVerdict {
  bool multi_resonant = false;
  double witness_energy = 0.0;
  std::vector<Site> family;  // centers of the disjoint resonant family
  int j_needed = 0;
};

/// nu+2 disjoint radius-L_{k-1} sub-cubes resonant at a common E.  Exact in
/// d = 1: the feasible E-set is a finite union of closed intervals whose
/// endpoints are lambda +- g delta_k, so probing all endpoints decides
/// existence; the per-probe disjoint family is greedy (exact in d = 1, a
/// certified lower bound otherwise).
MultiResonanceVerdict is_multiresonant(const Cube& host,
                                       const ClassificationConfig& cfg,
                                       CubeState& state);

struct ClusterCount {
  int count = 0;
  std::vector<Site> family;
};

/// Maximum (d = 1 exact, d >= 2 certified lower bound) number of pairwise
/// disjoint radius-L_k sub-cubes of the host that are (E, m)-singular at level
/// k.  Energies on a sub-cube spectrum cannot be certified non-singular and
/// count as singular.
ClusterCount singular_cluster_count(const Cube& host, double energy,
                                    const ClassificationConfig& cfg,
                                    CubeState& state);

struct LocalizationVerdict {
  bool localized = false;
  bool vacuous = false;  // no pair at the required distance
  Site worst_x, worst_y;
  int worst_eigenindex = -1;
  double worst_value = 0.0;
  double worst_bound = 0.0;
  double pair_distance_min = 0.0;  // L_k^{7/8}
  double rate = 0.0;               // gamma(m, L_{k-1})
};

/// Every eigenfunction pair product |psi_j(x) psi_j(y)| at distance
/// >= radius^{7/8} must fall below exp(-gamma(m, L_{k-1}) |x-y|).  At k = 0
/// the rate falls back to gamma(m, L_0) (no smaller scale exists).
LocalizationVerdict is_localized(const SpectralData& spec, const Cube& cube,
                                 const ClassificationConfig& cfg);

struct SubharmonicReport {
  bool ok = true;
  int checked = 0;
  int violations = 0;
  Site worst_site;
  double worst_excess = 0.0;  // |f(u)| - q * neighborhood max, worst case
};

/// Pointwise (ell, q, S)-subharmonicity on the cube: off S the value is
/// dominated by q times the (ell+1)-neighborhood max; on S the neighborhood
/// radius grows to r(x) + ell with r(x) the smallest annulus clearing S.
/// Sites where no such annulus radius exists impose no constraint.
SubharmonicReport subharmonic_check(const Cube& domain, const std::vector<double>& f,
                                    int ell, double q,
                                    const std::vector<char>& singular_mask);

struct RadialDescentReport {
  double w_sum = 0.0;    // total diameter of the singular cover
  double max_abs = 0.0;  // M(f, cube)
  double bound = 0.0;    // q^floor((L - W)/ell) * M, exponent clamped at 0
  double center_value = 0.0;
  bool holds = false;
};

/// The radial-descent bound |f(center)| <= q^floor((L-W)/ell) M(f) for an
/// (ell, q, S)-subharmonic profile with S covered by the given cubes.
RadialDescentReport radial_descent_bound(const Cube& domain,
                                         const std::vector<double>& f, int ell,
                                         double q,
                                         const std::vector<Cube>& singular_cover);

struct EnergyPolicy {
  std::vector<double> explicit_energies;
  bool use_subcube_eigenvalues = true;
};

struct EnergyVerdict {
  double energy = 0.0;
  bool resonant = false;
  bool cnr = false;
  std::optional<bool> ns;  // evaluated only at non-resonant energies
  double ns_lhs = 0.0;
  double ns_threshold = 0.0;
};

struct CubeReport {
  Cube cube;
  int level_k = 0;
  double g = 0.0;
  double m = 0.0;
  int center_step = 1;

  std::vector<EnergyVerdict> energies;  // explicit energies only
  int policy_energy_count = 0;
  int policy_resonant_count = 0;
  int policy_cnr_count = 0;
  int policy_cnr_ns_count = 0;

  std::optional<bool> good;  // k >= 1 only; no E with J_nu disjoint S sub-cubes
  TunnelingVerdict tunneling;            // k >= 1
  MultiResonanceVerdict multi_resonance;  // k >= 1
  LocalizationVerdict localization;

  double spectrum_min = 0.0;
  double spectrum_max = 0.0;
  double solver_residual = 0.0;
};

/// Full classification of one cube at one (omega, theta).  The energy policy
/// is the explicit list plus, when enabled, every sub-cube eigenvalue; the
/// exact spectral reductions make that set sufficient for the existential
/// tests.
CubeReport classify_cube(const Cube& host, const ClassificationConfig& cfg,
                         const TorusPoint& omega, const ThetaSample& theta,
                         const EnergyPolicy& policy, const RandeletteEnsemble& ens,
                         const FrequencyMatrix& freqs);

}  // namespace msalab::msa
