#include "msalab/spectral.hpp"

#include <cmath>

namespace msalab::spectral {

HamiltonianMatrix assemble(const Cube& cube, const PotentialFn& potential) {
  const auto sites = cube.sites();
  const auto n = static_cast<Eigen::Index>(sites.size());
  HamiltonianMatrix h{cube, Eigen::MatrixXd::Zero(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& x = sites[static_cast<std::size_t>(i)];
    h.mat(i, i) = potential(x);
    for (int c = 0; c < cube.dim(); ++c) {
      for (int s : {-1, +1}) {
        Site y = x;
        y[static_cast<std::size_t>(c)] += s;
        if (cube.contains(y)) {
          const auto j = static_cast<Eigen::Index>(cube.site_index(y));
          h.mat(i, j) = 1.0;
        }
      }
    }
  }
  return h;
}

HamiltonianMatrix assemble(const Cube& cube, const dynamics::TorusPoint& omega,
                           const randelette::ThetaSample& theta, double g,
                           const randelette::RandeletteEnsemble& ens,
                           const dynamics::FrequencyMatrix& freqs) {
  return assemble(cube, [&](const Site& x) {
    return g * randelette::hull_eval(ens, theta, dynamics::translate(omega, x, freqs));
  });
}

SpectralData spectrum(const HamiltonianMatrix& h, double residual_tol) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h.mat);
  if (solver.info() != Eigen::Success)
    throw NumericalError("symmetric eigensolver failed to converge (n=" +
                         std::to_string(h.mat.rows()) + ")");
  SpectralData s;
  s.evals = solver.eigenvalues();
  s.evecs = solver.eigenvectors();
  const double hnorm = std::max(1.0, h.mat.cwiseAbs().maxCoeff());
  s.residual =
      (h.mat * s.evecs - s.evecs * s.evals.asDiagonal()).cwiseAbs().maxCoeff() / hnorm;
  if (s.residual > residual_tol)
    throw NumericalError("eigendecomposition residual " + std::to_string(s.residual) +
                         " above tolerance");
  return s;
}

Eigen::VectorXd eigenvalues_only(const HamiltonianMatrix& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h.mat, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw NumericalError("symmetric eigensolver failed to converge (n=" +
                         std::to_string(h.mat.rows()) + ")");
  return solver.eigenvalues();
}

double dist_to_spectrum(const SpectralData& spec, double energy) {
  return (spec.evals.array() - energy).abs().minCoeff();
}

namespace {

double spectral_scale(const SpectralData& spec) {
  return std::max(1.0, spec.evals.cwiseAbs().maxCoeff());
}

}  // namespace

GreenQuery green(const SpectralData& spec, double energy, std::int64_t x,
                 std::int64_t y) {
  GreenQuery q;
  q.energy = energy;
  q.spectral_dist = dist_to_spectrum(spec, energy);
  if (q.spectral_dist <= 1e-12 * spectral_scale(spec))
    throw ResonantEnergyError("resonant energy: dist(Sigma, E) = " +
                              std::to_string(q.spectral_dist));
  const auto ix = static_cast<Eigen::Index>(x);
  const auto iy = static_cast<Eigen::Index>(y);
  double v = 0.0;
  for (Eigen::Index j = 0; j < spec.evals.size(); ++j)
    v += spec.evecs(ix, j) * spec.evecs(iy, j) / (spec.evals(j) - energy);
  q.value = v;
  return q;
}

Eigen::VectorXd green_row(const SpectralData& spec, double energy, std::int64_t x) {
  const double dist = dist_to_spectrum(spec, energy);
  if (dist <= 1e-12 * spectral_scale(spec))
    throw ResonantEnergyError("resonant energy: dist(Sigma, E) = " +
                              std::to_string(dist));
  Eigen::VectorXd w = spec.evecs.row(static_cast<Eigen::Index>(x)).transpose();
  w.array() /= (spec.evals.array() - energy);
  return spec.evecs * w;
}

GriCheck gri_residual(const Cube& host, const Cube& inner, const PotentialFn& pot,
                      double energy, const Site& u, const Site& y) {
  if (!inner.contains(u)) throw std::invalid_argument("u must lie in the inner cube");
  if (!host.contains(y) || inner.contains(y))
    throw std::invalid_argument("y must lie in host minus inner");
  for (const auto& x : inner.sites())
    if (!host.contains(x)) throw std::invalid_argument("inner cube must lie in host");

  const SpectralData sh = spectrum(assemble(host, pot));
  const SpectralData si = spectrum(assemble(inner, pot));

  GriCheck chk;
  chk.lhs = green(sh, energy, host.site_index(u), host.site_index(y)).value;

  const Eigen::VectorXd gu = green_row(si, energy, inner.site_index(u));
  const Eigen::VectorXd gy = green_row(sh, energy, host.site_index(y));
  double sum = 0.0;
  for (const auto& [w, wp] : lattice::boundary(inner)) {
    if (!host.contains(wp)) continue;  // hop absent from the host operator
    sum += gu(static_cast<Eigen::Index>(inner.site_index(w))) *
           gy(static_cast<Eigen::Index>(host.site_index(wp)));
  }
  chk.rhs = -sum;
  chk.residual = std::fabs(chk.lhs - chk.rhs);
  return chk;
}

InitialScalePredicate initial_scale_predicate(const lattice::ScaleSchedule& sched,
                                              int d, double m) {
  InitialScalePredicate p;
  p.lhs = g_delta(sched, 0);
  p.rhs = 2.0 * d + 4.0 * d * std::exp(4.0 * lattice::gamma_rate(m, sched.l0));
  p.margin = p.lhs / p.rhs;
  p.pass = p.lhs > p.rhs;
  return p;
}

double solve_g_for_margin(int l0, int d, double m, double margin) {
  const double rhs = 2.0 * d + 4.0 * d * std::exp(4.0 * lattice::gamma_rate(m, l0));
  const double sqrt_g = margin * rhs * std::exp(4.0 * std::sqrt(static_cast<double>(l0)));
  return sqrt_g * sqrt_g;
}

}  // namespace msalab::spectral
