#include "msalab/msa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace msalab::msa {

CubeState::CubeState(Cube host, TorusPoint omega, ThetaSample theta, double g,
                     const RandeletteEnsemble* ens, const FrequencyMatrix* freqs)
    : host_(std::move(host)),
      omega_(std::move(omega)),
      theta_(theta),
      g_(g),
      ens_(ens),
      freqs_(freqs) {}

double CubeState::potential(const Site& x) {
  auto it = pot_.find(x);
  if (it != pot_.end()) return it->second;
  const double v =
      g_ * randelette::hull_eval(*ens_, theta_, dynamics::translate(omega_, x, *freqs_));
  pot_.emplace(x, v);
  return v;
}

const SpectralData& CubeState::spectrum_of(const Cube& c) {
  const auto key = std::make_pair(c.center, c.radius);
  auto it = spectra_.find(key);
  if (it != spectra_.end()) return it->second;
  auto h = spectral::assemble(c, [this](const Site& x) { return potential(x); });
  auto [ins, ok] = spectra_.emplace(key, spectral::spectrum(h));
  return ins->second;
}

bool is_resonant(const SpectralData& spec, double energy, const ScaleSchedule& sched,
                 int k) {
  return spectral::dist_to_spectrum(spec, energy) < lattice::g_delta(sched, k);
}

std::vector<Cube> resonance_candidates(const Cube& host,
                                       const ClassificationConfig& cfg) {
  const auto r_lo =
      static_cast<int>(std::max<std::int64_t>(lattice::scale(cfg.sched, cfg.k - 1), 0));
  const auto r_hi = static_cast<int>(
      std::min<std::int64_t>(lattice::scale(cfg.sched, cfg.k), host.radius));
  std::vector<Cube> out;
  for (int r = r_lo; r <= r_hi; ++r)
    for (auto& c : lattice::subcube_centers(host, r, cfg.center_step))
      out.push_back(Cube{c, r});
  if (host.radius > static_cast<int>(lattice::scale(cfg.sched, cfg.k)))
    out.push_back(host);  // "including itself" even when oversized
  return out;
}

bool is_cnr(const Cube& host, double energy, const ClassificationConfig& cfg,
            CubeState& state) {
  for (const auto& c : resonance_candidates(host, cfg))
    if (is_resonant(state.spectrum_of(c), energy, cfg.sched, cfg.k)) return false;
  return true;
}

NsVerdict is_ns(const SpectralData& spec, const Cube& cube, double energy,
                const ClassificationConfig& cfg) {
  NsVerdict v;
  const std::int64_t lk = lattice::scale(cfg.sched, cfg.k);
  v.threshold = std::exp(-lattice::gamma_rate(cfg.m, std::max<std::int64_t>(lk, 1)) *
                         static_cast<double>(lk));
  const auto core_radius =
      static_cast<int>(std::max<std::int64_t>(lattice::scale(cfg.sched, cfg.k - 1), 0));
  const auto pairs = lattice::boundary(cube);

  double lhs = 0.0;
  const Cube core{cube.center, std::min(core_radius, cube.radius)};
  for (const auto& x : core.sites()) {
    const Eigen::VectorXd row = spectral::green_row(spec, energy, cube.site_index(x));
    double sum = 0.0;
    for (const auto& [y, yp] : pairs)
      sum += std::fabs(row(static_cast<Eigen::Index>(cube.site_index(y))));
    lhs = std::max(lhs, sum);
  }
  v.lhs = lhs;
  v.ns = lhs <= v.threshold;
  return v;
}

double pair_resonance_gap(const SpectralData& a, const SpectralData& b) {
  // both eigenvalue lists ascending: two-pointer merge
  double gap = std::numeric_limits<double>::infinity();
  Eigen::Index i = 0, j = 0;
  while (i < a.evals.size() && j < b.evals.size()) {
    gap = std::min(gap, std::fabs(a.evals(i) - b.evals(j)));
    if (a.evals(i) < b.evals(j))
      ++i;
    else
      ++j;
  }
  return gap;
}

namespace {

// E inside some closed interval [lambda - w, lambda + w]; membership is
// decided on the computed endpoints so that probing an endpoint is never lost
// to rounding.
bool within_inflation(const SpectralData& s, double e, double width) {
  for (Eigen::Index i = 0; i < s.evals.size(); ++i)
    if (e >= s.evals(i) - width && e <= s.evals(i) + width) return true;
  return false;
}

}  // namespace

std::optional<double> common_resonance_energy(
    const std::vector<const SpectralData*>& family, double width) {
  if (family.empty()) return std::nullopt;
  std::vector<double> probes;
  for (const auto* s : family)
    for (Eigen::Index i = 0; i < s->evals.size(); ++i) {
      probes.push_back(s->evals(i) - width);
      probes.push_back(s->evals(i) + width);
    }
  std::sort(probes.begin(), probes.end());
  for (double e : probes) {
    bool all = true;
    for (const auto* s : family)
      if (!within_inflation(*s, e, width)) {
        all = false;
        break;
      }
    if (all) return e;
  }
  return std::nullopt;
}

TunnelingVerdict is_tunneling(const Cube& host, const ClassificationConfig& cfg,
                              CubeState& state) {
  if (cfg.k < 1) throw std::invalid_argument("tunneling defined for k >= 1");
  TunnelingVerdict v;
  v.threshold = 2.0 * lattice::g_delta(cfg.sched, cfg.k);
  v.best_gap = std::numeric_limits<double>::infinity();

  const std::int64_t lk = lattice::scale(cfg.sched, cfg.k);
  const std::int64_t lkm1 = lattice::scale(cfg.sched, cfg.k - 1);
  const auto rho_min =
      static_cast<std::int64_t>(std::ceil(std::pow(static_cast<double>(lk), 0.25)));
  if (rho_min > lkm1)
    throw std::logic_error("schedule violates L_k^{1/4} <= L_{k-1}");

  const auto cands = resonance_candidates(host, cfg);
  for (std::size_t a = 0; a < cands.size(); ++a) {
    for (std::size_t b = a + 1; b < cands.size(); ++b) {
      if (!lattice::cubes_disjoint(cands[a], cands[b])) continue;
      const double gap =
          pair_resonance_gap(state.spectrum_of(cands[a]), state.spectrum_of(cands[b]));
      if (gap < v.best_gap) {
        v.best_gap = gap;
        v.witness_a = cands[a];
        v.witness_b = cands[b];
      }
      if (gap <= v.threshold) {
        v.tunneling = true;
        v.witness_a = cands[a];
        v.witness_b = cands[b];
        v.best_gap = gap;
        return v;
      }
    }
  }
  return v;
}

MultiResonanceVerdict is_multiresonant(const Cube& host,
                                       const ClassificationConfig& cfg,
                                       CubeState& state) {
  if (cfg.k < 1) throw std::invalid_argument("multi-resonance defined for k >= 1");
  MultiResonanceVerdict v;
  v.j_needed = cfg.sched.j_nu();
  const double width = lattice::g_delta(cfg.sched, cfg.k);
  const auto radius =
      static_cast<int>(std::max<std::int64_t>(lattice::scale(cfg.sched, cfg.k - 1), 0));
  const auto centers = lattice::subcube_centers(host, radius, cfg.center_step);
  if (centers.empty()) return v;

  std::vector<const SpectralData*> specs;
  specs.reserve(centers.size());
  for (const auto& c : centers) specs.push_back(&state.spectrum_of(Cube{c, radius}));

  // The feasible-E set is a finite union of closed intervals with endpoints
  // lambda +- width; if an E with a J-fold disjoint resonant family exists,
  // one exists at an endpoint.
  std::vector<double> probes;
  for (const auto* s : specs)
    for (Eigen::Index i = 0; i < s->evals.size(); ++i) {
      probes.push_back(s->evals(i) - width);
      probes.push_back(s->evals(i) + width);
    }
  std::sort(probes.begin(), probes.end());
  probes.erase(std::unique(probes.begin(), probes.end()), probes.end());

  const int min_sep = 2 * radius + 1;
  for (const double e : probes) {
    std::vector<Site> family;
    for (std::size_t i = 0; i < centers.size(); ++i) {
      if (!within_inflation(*specs[i], e, width)) continue;
      bool ok = true;
      for (const auto& f : family)
        if (lattice::chebyshev(centers[i], f) < min_sep) {
          ok = false;
          break;
        }
      if (ok) family.push_back(centers[i]);
      if (static_cast<int>(family.size()) >= v.j_needed) {
        v.multi_resonant = true;
        v.witness_energy = e;
        v.family = family;
        return v;
      }
    }
  }
  return v;
}

ClusterCount singular_cluster_count(const Cube& host, double energy,
                                    const ClassificationConfig& cfg,
                                    CubeState& state) {
  const auto radius =
      static_cast<int>(std::max<std::int64_t>(lattice::scale(cfg.sched, cfg.k), 0));
  ClusterCount out;
  if (radius > host.radius) return out;
  auto singular = [&](const Site& c) {
    const Cube sub{c, radius};
    try {
      return !is_ns(state.spectrum_of(sub), sub, energy, cfg).ns;
    } catch (const spectral::ResonantEnergyError&) {
      return true;  // cannot be certified non-singular
    }
  };
  out.family = lattice::disjoint_subcube_family(host, radius, singular, cfg.center_step);
  out.count = static_cast<int>(out.family.size());
  return out;
}

LocalizationVerdict is_localized(const SpectralData& spec, const Cube& cube,
                                 const ClassificationConfig& cfg) {
  LocalizationVerdict v;
  const std::int64_t l_rate =
      lattice::scale(cfg.sched, std::max(cfg.k - 1, 0));  // k = 0 falls back to L_0
  v.rate = lattice::gamma_rate(cfg.m, std::max<std::int64_t>(l_rate, 1));
  v.pair_distance_min = std::pow(static_cast<double>(cube.radius), 7.0 / 8.0);

  const auto sites = cube.sites();
  v.localized = true;
  v.vacuous = true;
  double worst_margin = 0.0;
  for (std::size_t a = 0; a < sites.size(); ++a) {
    for (std::size_t b = a + 1; b < sites.size(); ++b) {
      const int dist = lattice::chebyshev(sites[a], sites[b]);
      if (static_cast<double>(dist) < v.pair_distance_min) continue;
      v.vacuous = false;
      const double bound = std::exp(-v.rate * dist);
      const auto ia = static_cast<Eigen::Index>(cube.site_index(sites[a]));
      const auto ib = static_cast<Eigen::Index>(cube.site_index(sites[b]));
      for (Eigen::Index j = 0; j < spec.evals.size(); ++j) {
        const double val = std::fabs(spec.evecs(ia, j) * spec.evecs(ib, j));
        if (val - bound > worst_margin) {
          worst_margin = val - bound;
          v.worst_x = sites[a];
          v.worst_y = sites[b];
          v.worst_eigenindex = static_cast<int>(j);
          v.worst_value = val;
          v.worst_bound = bound;
          v.localized = false;
        }
      }
    }
  }
  return v;
}

namespace {

// Annulus {y in domain : r - ell < |y - x| <= r + ell} entirely clear of S?
bool annulus_clear(const Cube& domain, const std::vector<char>& mask, const Site& x,
                   int r, int ell) {
  for (const auto& y : domain.sites()) {
    const int d = lattice::chebyshev(x, y);
    if (d > r - ell && d <= r + ell && mask[static_cast<std::size_t>(domain.site_index(y))])
      return false;
  }
  return true;
}

}  // namespace

SubharmonicReport subharmonic_check(const Cube& domain, const std::vector<double>& f,
                                    int ell, double q,
                                    const std::vector<char>& singular_mask) {
  if (ell < 1) throw std::invalid_argument("subharmonic radius ell must be >= 1");
  if (!(q > 0.0)) throw std::invalid_argument("subharmonic factor q must be > 0");
  if (f.size() != static_cast<std::size_t>(domain.site_count()) ||
      singular_mask.size() != f.size())
    throw std::invalid_argument("profile/mask size mismatch");

  SubharmonicReport rep;
  const auto sites = domain.sites();
  for (const auto& u : sites) {
    if (domain.radius - lattice::chebyshev(u, domain.center) < ell) continue;
    const bool on_s = singular_mask[static_cast<std::size_t>(domain.site_index(u))] != 0;
    int reach;
    if (!on_s) {
      reach = ell + 1;
    } else {
      // r(x): smallest annulus radius whose ell-collar avoids S
      const int r_max = domain.radius + lattice::chebyshev(u, domain.center) + ell + 1;
      int rx = -1;
      for (int r = ell + 1; r <= r_max; ++r)
        if (annulus_clear(domain, singular_mask, u, r, ell)) {
          rx = r;
          break;
        }
      if (rx < 0) continue;  // no constraint at this site
      reach = rx + ell;
    }
    double nb_max = 0.0;
    for (const auto& y : sites)
      if (lattice::chebyshev(u, y) <= reach)
        nb_max = std::max(nb_max, std::fabs(f[static_cast<std::size_t>(domain.site_index(y))]));
    ++rep.checked;
    const double lhs = std::fabs(f[static_cast<std::size_t>(domain.site_index(u))]);
    const double excess = lhs - q * nb_max * (1.0 + 1e-12);
    if (excess > 0.0) {
      ++rep.violations;
      rep.ok = false;
      if (excess > rep.worst_excess) {
        rep.worst_excess = excess;
        rep.worst_site = u;
      }
    }
  }
  return rep;
}

RadialDescentReport radial_descent_bound(const Cube& domain,
                                         const std::vector<double>& f, int ell,
                                         double q,
                                         const std::vector<Cube>& singular_cover) {
  RadialDescentReport rep;
  for (const auto& c : singular_cover) rep.w_sum += 2.0 * c.radius;
  for (double v : f) rep.max_abs = std::max(rep.max_abs, std::fabs(v));
  const double expo =
      std::max(0.0, std::floor((domain.radius - rep.w_sum) / static_cast<double>(ell)));
  rep.bound = std::pow(q, expo) * rep.max_abs;
  rep.center_value = std::fabs(f[static_cast<std::size_t>(domain.site_index(domain.center))]);
  rep.holds = rep.center_value <= rep.bound * (1.0 + 1e-12);
  return rep;
}

CubeReport classify_cube(const Cube& host, const ClassificationConfig& cfg,
                         const TorusPoint& omega, const ThetaSample& theta,
                         const EnergyPolicy& policy, const RandeletteEnsemble& ens,
                         const FrequencyMatrix& freqs) {
  CubeState state(host, omega, theta, cfg.sched.g, &ens, &freqs);
  CubeReport rep;
  rep.cube = host;
  rep.level_k = cfg.k;
  rep.g = cfg.sched.g;
  rep.m = cfg.m;
  rep.center_step = cfg.center_step;

  const SpectralData& host_spec = state.spectrum_of(host);
  rep.spectrum_min = host_spec.evals.minCoeff();
  rep.spectrum_max = host_spec.evals.maxCoeff();
  rep.solver_residual = host_spec.residual;

  // policy energies: explicit list plus every candidate sub-cube eigenvalue
  std::vector<double> policy_energies = policy.explicit_energies;
  if (policy.use_subcube_eigenvalues) {
    for (const auto& c : resonance_candidates(host, cfg)) {
      const auto& s = state.spectrum_of(c);
      for (Eigen::Index i = 0; i < s.evals.size(); ++i)
        policy_energies.push_back(s.evals(i));
    }
  }
  std::sort(policy_energies.begin(), policy_energies.end());
  policy_energies.erase(std::unique(policy_energies.begin(), policy_energies.end()),
                        policy_energies.end());

  auto judge = [&](double e) {
    EnergyVerdict ev;
    ev.energy = e;
    ev.resonant = is_resonant(host_spec, e, cfg.sched, cfg.k);
    ev.cnr = !ev.resonant && is_cnr(host, e, cfg, state);
    if (!ev.resonant) {
      // a non-resonant energy can still sit under the resolvent guard when
      // g delta_k is below 1e-12 * ||Sigma||; leave ns unset in that case
      try {
        const auto ns = is_ns(host_spec, host, e, cfg);
        ev.ns = ns.ns;
        ev.ns_lhs = ns.lhs;
        ev.ns_threshold = ns.threshold;
      } catch (const spectral::ResonantEnergyError&) {
      }
    }
    return ev;
  };

  for (double e : policy.explicit_energies) rep.energies.push_back(judge(e));

  bool good = true;
  for (double e : policy_energies) {
    ++rep.policy_energy_count;
    const auto ev = judge(e);
    if (ev.resonant) ++rep.policy_resonant_count;
    if (ev.cnr) {
      ++rep.policy_cnr_count;
      if (ev.ns.value_or(false)) ++rep.policy_cnr_ns_count;
    }
    if (cfg.k >= 1 && good) {
      const auto cluster = singular_cluster_count(host, e, cfg.at_level(cfg.k - 1), state);
      if (cluster.count >= cfg.sched.j_nu()) good = false;
    }
  }
  if (cfg.k >= 1) {
    rep.good = good;
    rep.tunneling = is_tunneling(host, cfg, state);
    rep.multi_resonance = is_multiresonant(host, cfg, state);
  }
  rep.localization = is_localized(host_spec, host, cfg);
  return rep;
}

}  // namespace msalab::msa
