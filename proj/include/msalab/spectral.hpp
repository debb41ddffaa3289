#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <vector>

#include "msalab/lattice.hpp"
#include "msalab/randelette.hpp"

namespace msalab::spectral {

using lattice::Cube;
using lattice::Site;

/// Numerical failure distinct from configuration errors (distinct CLI exit
/// code).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ResonantEnergyError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Finite-cube Hamiltonian with Dirichlet truncation: unit hopping between
/// l1-neighbors inside the cube, diagonal g v(T^x omega, theta).
struct HamiltonianMatrix {
  Cube cube;
  Eigen::MatrixXd mat;

  std::int64_t site_index(const Site& x) const { return cube.site_index(x); }
};

using PotentialFn = std::function<double(const Site&)>;

/// Assemble from an arbitrary diagonal.
HamiltonianMatrix assemble(const Cube& cube, const PotentialFn& potential);

/// Assemble with the randelette hull: diagonal g v(T^x omega, theta).
HamiltonianMatrix assemble(const Cube& cube, const dynamics::TorusPoint& omega,
                           const randelette::ThetaSample& theta, double g,
                           const randelette::RandeletteEnsemble& ens,
                           const dynamics::FrequencyMatrix& freqs);

/// Full symmetric eigendecomposition; eigenvalues ascending, eigenvectors
/// orthonormal columns.
struct SpectralData {
  Eigen::VectorXd evals;
  Eigen::MatrixXd evecs;
  double residual = 0.0;  // max_j |H psi_j - lambda_j psi_j|_inf / max(1, |H|_inf)
};

SpectralData spectrum(const HamiltonianMatrix& h, double residual_tol = 1e-10);

/// Eigenvalues alone, ascending; cheaper when no Green functions are needed.
Eigen::VectorXd eigenvalues_only(const HamiltonianMatrix& h);

double dist_to_spectrum(const SpectralData& spec, double energy);

struct GreenQuery {
  double energy = 0.0;
  double value = 0.0;
  double spectral_dist = 0.0;
};

/// G = (H - E)^{-1} entry via the eigen-expansion
/// sum_j psi_j(x) psi_j(y) / (lambda_j - E).  Throws ResonantEnergyError when
/// E is numerically in the spectrum.
GreenQuery green(const SpectralData& spec, double energy, std::int64_t x,
                 std::int64_t y);

/// One row of the resolvent, G(x, .); cheaper than per-entry queries when a
/// classifier sums over many boundary sites.
Eigen::VectorXd green_row(const SpectralData& spec, double energy, std::int64_t x);

struct GriCheck {
  double lhs = 0.0;       // G_host(u, y)
  double rhs = 0.0;       // -(boundary sum); the identity under G = (H-E)^{-1}
  double residual = 0.0;  // |lhs - rhs|
};

/// Geometric resolvent identity between an inner cube and its host:
///   G_host(u, y) = - sum_{(w,w') in d(inner), w' in host}
///                     G_inner(u, w) G_host(w', y)
/// for u in inner, y in host \ inner.  With the convention G = (H - E)^{-1}
/// the boundary sum enters with a minus sign.  The identity is exact;
/// residuals above ~1e-9 (1 + |lhs|) indicate an indexing bug.
GriCheck gri_residual(const Cube& host, const Cube& inner, const PotentialFn& pot,
                      double energy, const Site& u, const Site& y);

struct InitialScalePredicate {
  bool pass = false;
  double margin = 0.0;  // lhs / rhs
  double lhs = 0.0;     // g delta_0
  double rhs = 0.0;     // 2d + 4d exp(4 gamma(m, L_0))
};

/// Large-disorder certificate g delta_0 > 2d + 4d e^{4 gamma(m, L_0)} under
/// which non-resonant radius-L_0 cubes are non-singular.
InitialScalePredicate initial_scale_predicate(const lattice::ScaleSchedule& sched,
                                              int d, double m);

/// The g whose initial-scale margin equals the given target (margin is
/// monotone in g: g delta_0 = sqrt(g) e^{-4 sqrt(L_0)}).
double solve_g_for_margin(int l0, int d, double m, double margin);

}  // namespace msalab::spectral
