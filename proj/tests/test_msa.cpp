#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "msalab/msa.hpp"
#include "msalab/rng.hpp"

using namespace msalab;
using namespace msalab::msa;
using msalab::dynamics::FrequencyKind;
using msalab::dynamics::TorusPoint;
using msalab::lattice::Cube;
using msalab::lattice::ScaleSchedule;
using msalab::lattice::Site;
using msalab::randelette::ThetaSample;

namespace {

SpectralData synthetic_spec(std::vector<double> evals) {
  std::sort(evals.begin(), evals.end());
  SpectralData s;
  s.evals = Eigen::Map<Eigen::VectorXd>(evals.data(), static_cast<Eigen::Index>(evals.size()));
  s.evecs = Eigen::MatrixXd::Identity(s.evals.size(), s.evals.size());
  s.residual = 0.0;
  return s;
}

// grid-scan oracle for PAIRS: step width/10 plus all pair midpoints, which is
// exact because a feasible pair admits the midpoint of its closest eigenvalue
// pair as a witness
bool pair_oracle(const SpectralData& a, const SpectralData& b, double width) {
  double lo = std::min(a.evals.minCoeff(), b.evals.minCoeff());
  double hi = std::max(a.evals.maxCoeff(), b.evals.maxCoeff());
  std::vector<double> grid;
  for (Eigen::Index i = 0; i < a.evals.size(); ++i)
    for (Eigen::Index j = 0; j < b.evals.size(); ++j)
      grid.push_back((a.evals(i) + b.evals(j)) / 2.0);
  for (double e = lo - 2 * width; e <= hi + 2 * width; e += width / 10.0)
    grid.push_back(e);
  for (double e : grid)
    if (spectral::dist_to_spectrum(a, e) <= width &&
        spectral::dist_to_spectrum(b, e) <= width)
      return true;
  return false;
}

// sweep-line oracle for J-fold families: open/close events of the closed
// intervals [lambda - w, lambda + w], opens before closes at ties; feasible
// iff at some event every family member has positive coverage
bool family_oracle(const std::vector<const SpectralData*>& family, double width) {
  struct Event {
    double pos;
    int kind;  // 0 = open, 1 = close
    std::size_t who;
  };
  std::vector<Event> events;
  for (std::size_t f = 0; f < family.size(); ++f)
    for (Eigen::Index i = 0; i < family[f]->evals.size(); ++i) {
      events.push_back({family[f]->evals(i) - width, 0, f});
      events.push_back({family[f]->evals(i) + width, 1, f});
    }
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    return a.pos < b.pos || (a.pos == b.pos && a.kind < b.kind);
  });
  std::vector<int> cover(family.size(), 0);
  int active = 0;
  for (const auto& ev : events) {
    if (ev.kind == 0) {
      if (cover[ev.who]++ == 0) ++active;
    } else {
      if (--cover[ev.who] == 0) --active;
    }
    if (active == static_cast<int>(family.size()) && ev.kind == 0) return true;
  }
  return false;
}

msa::CubeState flat_state(const Cube& host, double level, double g,
                          const randelette::RandeletteEnsemble& ens,
                          const dynamics::FrequencyMatrix& freqs) {
  // theta with only the generation-0 global coefficient set: v == level
  const auto theta = ThetaSample::zeros().with_override(0, 1, level);
  return msa::CubeState(host, TorusPoint({0.3}), theta, g, &ens, &freqs);
}

}  // namespace

TEST_CASE("is_resonant and the tie rule") {
  const ScaleSchedule sched{6, 25.0, 1};
  const auto spec = synthetic_spec({5.0});
  CHECK(is_resonant(spec, 5.0, sched, 0));  // distance zero
  const double w = lattice::g_delta(sched, 0);
  CHECK_FALSE(is_resonant(spec, 5.0 + 2 * w, sched, 0));
  CHECK_FALSE(is_resonant(spec, 5.0 + w, sched, 0));  // equality -> non-resonant
  CHECK(is_resonant(spec, 5.0 + 0.5 * w, sched, 0));
}

TEST_CASE("pair gap: identical, separated, and the grid-scan oracle") {
  CHECK(pair_resonance_gap(synthetic_spec({0.0}), synthetic_spec({3.0})) ==
        doctest::Approx(3.0));
  const auto a = synthetic_spec({0.2, 1.7, 2.9});
  CHECK(pair_resonance_gap(a, a) == 0.0);

  CounterRng rng(2024);
  int positive = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> ea(5), eb(7);
    for (auto& x : ea) x = 10.0 * rng.next_u01();
    for (auto& x : eb) x = 10.0 * rng.next_u01();
    const auto sa = synthetic_spec(ea);
    const auto sb = synthetic_spec(eb);
    const double width = 0.02 + 0.2 * rng.next_u01();
    const bool reduction = pair_resonance_gap(sa, sb) <= 2.0 * width;
    CHECK(reduction == pair_oracle(sa, sb, width));
    CHECK(reduction == family_oracle({&sa, &sb}, width));
    positive += reduction;
  }
  CHECK(positive > 10);  // the trial mix exercises both verdicts
  CHECK(positive < 190);
}

TEST_CASE("common resonance energy: endpoint probing equals the grid oracle") {
  CounterRng rng(99);
  int positive = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int fam = 2 + static_cast<int>(rng.next_index(3));
    std::vector<SpectralData> specs;
    for (int f = 0; f < fam; ++f) {
      std::vector<double> e(4);
      for (auto& x : e) x = 6.0 * rng.next_u01();
      specs.push_back(synthetic_spec(e));
    }
    std::vector<const SpectralData*> ptrs;
    for (const auto& s : specs) ptrs.push_back(&s);
    const double width = 0.05 + 0.3 * rng.next_u01();
    const auto found = common_resonance_energy(ptrs, width);
    const bool oracle = family_oracle(ptrs, width);
    CHECK(found.has_value() == oracle);
    if (found) {
      for (const auto* s : ptrs)
        CHECK(spectral::dist_to_spectrum(*s, *found) <= width * (1 + 1e-12));
      ++positive;
    }
  }
  CHECK(positive > 5);

  // spectra sharing a common eigenvalue: witness at that eigenvalue
  const auto s1 = synthetic_spec({1.0, 5.0});
  const auto s2 = synthetic_spec({3.0, 5.0});
  const auto s3 = synthetic_spec({5.0, 9.0});
  const auto e = common_resonance_energy({&s1, &s2, &s3}, 0.01);
  REQUIRE(e.has_value());
  CHECK(*e == doctest::Approx(5.0).epsilon(0.02));
  // pairwise separation beyond 2 width: no common energy
  const auto far = synthetic_spec({3.0, 9.0});
  CHECK_FALSE(common_resonance_energy({&s1, &far}, 0.4).has_value());
}

TEST_CASE("is_cnr at k = 0: single-site candidates and self-resonance") {
  const auto ens = randelette::make_ensemble(1, randelette::default_decay(1), 40, 1);
  const auto freqs = dynamics::diophantine_frequency(FrequencyKind::golden, 1, 1);
  const ScaleSchedule sched{6, 1.0e9, 1};
  const ClassificationConfig cfg{sched, 1.0, 0, 1};
  const Cube host{{0}, 6};

  // flat potential 0.8: every sub-spectrum sits near 0.8 g, far from E = 0
  auto state = flat_state(host, 0.8, sched.g, ens, freqs);
  CHECK(is_cnr(host, 0.0, cfg, state));
  // E on the host spectrum: resonant, hence not CNR
  const double e0 = state.spectrum_of(host).evals(0);
  CHECK_FALSE(is_cnr(host, e0, cfg, state));
  // single-site candidate check: |g v(x) - E| < g delta_0 at some site
  const double site_val = state.potential({3});
  CHECK_FALSE(is_cnr(host, site_val, cfg, state));
}

TEST_CASE("is_ns: Combes-Thomas regime and the free-Laplacian band center") {
  const auto ens = randelette::make_ensemble(1, randelette::default_decay(1), 40, 1);
  const auto freqs = dynamics::diophantine_frequency(FrequencyKind::golden, 1, 1);

  SUBCASE("large g, E far below the spectrum: NS") {
    const ScaleSchedule sched{6, 1.0e4, 1};
    const ClassificationConfig cfg{sched, 1.0, 0, 1};
    const Cube cube{{0}, 6};
    auto state = flat_state(cube, 0.9, sched.g, ens, freqs);
    const auto& spec = state.spectrum_of(cube);
    const double e = spec.evals.minCoeff() - sched.g;
    const auto v = is_ns(spec, cube, e, cfg);
    CHECK(v.ns);
    CHECK(v.lhs < v.threshold);
    CHECK(v.threshold == doctest::Approx(std::exp(-lattice::gamma_rate(1.0, 6) * 6.0)));
  }

  SUBCASE("free Laplacian near the band center: singular for m >= 0.5") {
    const ScaleSchedule sched{7, 1.0, 1};  // L_0 = 7 as the level-0 radius
    const ClassificationConfig cfg{sched, 0.5, 0, 1};
    const Cube cube{{0}, 7};
    auto state = flat_state(cube, 0.0, 0.0, ens, freqs);
    const auto& spec = state.spectrum_of(cube);
    // E at the midpoint of the two eigenvalues nearest zero (the band center
    // itself is an eigenvalue of every odd path)
    double below = -10, above = 10;
    for (Eigen::Index i = 0; i < spec.evals.size(); ++i) {
      if (spec.evals(i) < 0) below = std::max(below, spec.evals(i));
      if (spec.evals(i) > 0) above = std::min(above, spec.evals(i));
    }
    const double e = (below + above) / 2.0;
    const auto v = is_ns(spec, cube, e, cfg);
    CHECK_FALSE(v.ns);  // polynomial decay only
    CHECK(v.lhs > v.threshold);
  }
}

TEST_CASE("tunneling: free Laplacian twins tunnel, small hosts cannot") {
  const auto ens = randelette::make_ensemble(1, randelette::default_decay(1), 40, 1);
  const auto freqs = dynamics::diophantine_frequency(FrequencyKind::golden, 1, 1);
  const ScaleSchedule sched{6, 0.0, 1};  // g = 0: identical sub-cube spectra
  const ClassificationConfig cfg{sched, 1.0, 1, 1};
  const Cube host{{0}, 15};
  msa::CubeState state(host, TorusPoint({0.1}), ThetaSample::zeros(), 0.0, &ens, &freqs);
  const auto v = is_tunneling(host, cfg, state);
  CHECK(v.tunneling);
  CHECK(v.best_gap == 0.0);
  REQUIRE(v.witness_a.has_value());
  CHECK(lattice::cubes_disjoint(*v.witness_a, *v.witness_b));

  // a host too small for two disjoint radius-L_0 sub-cubes
  const Cube tiny{{0}, 8};
  msa::CubeState state2(tiny, TorusPoint({0.1}), ThetaSample::zeros(), 0.0, &ens, &freqs);
  CHECK_FALSE(is_tunneling(tiny, cfg, state2).tunneling);
  CHECK_THROWS_AS(is_tunneling(host, ClassificationConfig{sched, 1.0, 0, 1}, state),
                  std::invalid_argument);
}

TEST_CASE("multi-resonance: packing geometry vs identical spectra") {
  const auto ens = randelette::make_ensemble(1, randelette::default_decay(1), 40, 1);
  const auto freqs = dynamics::diophantine_frequency(FrequencyKind::golden, 1, 1);
  const ScaleSchedule sched{6, 0.0, 1};
  const ClassificationConfig cfg{sched, 1.0, 1, 1};
  const Cube host{{0}, 15};
  msa::CubeState state(host, TorusPoint({0.1}), ThetaSample::zeros(), 0.0, &ens, &freqs);
  // even with identical spectra (gap 0 everywhere), J_nu = 3 disjoint
  // radius-6 cubes do not fit in radius 15
  CHECK_FALSE(is_multiresonant(host, cfg, state).multi_resonant);

  // widen the host so three disjoint radius-6 cubes fit: identical spectra
  // at g = 0 make it multi-resonant
  const Cube wide{{0}, 20};
  msa::CubeState state2(wide, TorusPoint({0.1}), ThetaSample::zeros(), 0.0, &ens, &freqs);
  const auto v = is_multiresonant(wide, cfg, state2);
  CHECK(v.multi_resonant);
  CHECK(static_cast<int>(v.family.size()) == 3);
}

TEST_CASE("singular cluster count") {
  const auto ens = randelette::make_ensemble(1, randelette::default_decay(1), 40, 1);
  const auto freqs = dynamics::diophantine_frequency(FrequencyKind::golden, 1, 1);
  const ScaleSchedule sched{6, 1.0e4, 1};
  const ClassificationConfig cfg{sched, 1.0, 0, 1};
  const Cube host{{0}, 15};
  auto state = flat_state(host, 0.9, sched.g, ens, freqs);
  // E far below every sub-spectrum: all radius-6 sub-cubes NS
  const double e = sched.g * 0.9 - 2.0 - sched.g;
  CHECK(singular_cluster_count(host, e, cfg, state).count == 0);
  // E in the bulk at g = 0: free sub-cubes are singular; cluster count maxes
  // at the packing capacity floor(31 / 13) = 2
  const ScaleSchedule sched0{6, 0.0, 1};
  const ClassificationConfig cfg0{sched0, 1.0, 0, 1};
  msa::CubeState state0(host, TorusPoint({0.1}), ThetaSample::zeros(), 0.0, &ens, &freqs);
  CHECK(singular_cluster_count(host, 0.05, cfg0, state0).count == 2);
}

TEST_CASE("localization: free Laplacian extended vs strong-disorder pinned") {
  SUBCASE("g = 0, k = 1, radius 15: sine eigenvectors violate the bound") {
    const ScaleSchedule sched{6, 1e-12, 1};
    const ClassificationConfig cfg{sched, 0.5, 1, 1};
    const Cube cube{{0}, 15};
    const auto spec = spectral::spectrum(
        spectral::assemble(cube, [](const Site&) { return 0.0; }));
    const auto v = is_localized(spec, cube, cfg);
    CHECK_FALSE(v.localized);
    CHECK_FALSE(v.vacuous);
    CHECK(v.worst_value > v.worst_bound);
  }

  SUBCASE("well-separated strong potential: near-delta eigenvectors localize") {
    const ScaleSchedule sched{6, 1e8, 1};
    const ClassificationConfig cfg{sched, 1.0, 0, 1};
    const Cube cube{{0}, 6};
    const auto spec = spectral::spectrum(spectral::assemble(
        cube, [&](const Site& x) { return sched.g * (1.0 + 0.05 * (x[0] + 6)); }));
    const auto v = is_localized(spec, cube, cfg);
    CHECK(v.localized);
  }

  SUBCASE("radius-0 cube: vacuously localized") {
    const ScaleSchedule sched{6, 1.0, 1};
    const ClassificationConfig cfg{sched, 1.0, 0, 1};
    const Cube cube{{5}, 0};
    const auto spec = spectral::spectrum(
        spectral::assemble(cube, [](const Site&) { return 1.0; }));
    const auto v = is_localized(spec, cube, cfg);
    CHECK(v.localized);
    CHECK(v.vacuous);
  }
}

TEST_CASE("subharmonic checker") {
  const Cube dom{{0}, 8};
  const auto n = static_cast<std::size_t>(dom.site_count());

  SUBCASE("constant profile, q = 1, empty S") {
    std::vector<double> f(n, 1.0);
    std::vector<char> s(n, 0);
    CHECK(subharmonic_check(dom, f, 2, 1.0, s).ok);
  }

  SUBCASE("geometric profile is subharmonic; a planted spike is rejected") {
    const double q = 0.25;
    const int ell = 2;
    std::vector<double> f(n);
    std::vector<char> s(n, 0);
    for (const auto& x : dom.sites())
      f[static_cast<std::size_t>(dom.site_index(x))] =
          std::pow(q, std::floor((8.0 - std::abs(x[0])) / ell));
    CHECK(subharmonic_check(dom, f, ell, q, s).ok);

    // hand-rolled loop agrees point by point on the interior
    for (const auto& u : dom.sites()) {
      if (8 - std::abs(u[0]) < ell) continue;
      double nb = 0.0;
      for (const auto& y : dom.sites())
        if (std::abs(y[0] - u[0]) <= ell + 1)
          nb = std::max(nb, f[static_cast<std::size_t>(dom.site_index(y))]);
      CHECK(f[static_cast<std::size_t>(dom.site_index(u))] <= q * nb * (1 + 1e-12));
    }

    auto bad = f;
    bad[static_cast<std::size_t>(dom.site_index({1}))] = 1.0;  // interior spike
    const auto rep = subharmonic_check(dom, bad, ell, q, s);
    CHECK_FALSE(rep.ok);
    CHECK(rep.violations >= 1);
    CHECK(rep.worst_site == Site{1});
  }

  SUBCASE("singular set relaxes the local condition via r(x)") {
    // source profile growing toward the right boundary, q^(8 - x); a bump at
    // the origin that the plain condition rejects but an S-marked site may
    // carry, since r(0) = 2 lets the bound reach the larger values at x = 3
    const double q = 0.5;
    const int ell = 1;
    std::vector<double> f(n, 0.0);
    std::vector<char> s(n, 0);
    for (const auto& x : dom.sites())
      f[static_cast<std::size_t>(dom.site_index(x))] = std::pow(q, 8.0 - x[0]);
    f[static_cast<std::size_t>(dom.site_index({0}))] *= 1.0 / (q * q);
    s[static_cast<std::size_t>(dom.site_index({0}))] = 1;
    std::vector<char> none(n, 0);
    CHECK_FALSE(subharmonic_check(dom, f, ell, q, none).ok);
    CHECK(subharmonic_check(dom, f, ell, q, s).ok);
  }
}

TEST_CASE("radial descent bound") {
  const Cube dom{{0}, 8};
  const auto n = static_cast<std::size_t>(dom.site_count());

  SUBCASE("q = 1 degenerates to the max bound") {
    std::vector<double> f(n, 0.7);
    CHECK(radial_descent_bound(dom, f, 2, 1.0, {}).holds);
  }

  SUBCASE("W >= L clamps the exponent to zero") {
    std::vector<double> f(n, 0.3);
    const auto rep = radial_descent_bound(dom, f, 2, 0.1, {Cube{{0}, 5}});
    CHECK(rep.w_sum == doctest::Approx(10.0));
    CHECK(rep.bound == doctest::Approx(0.3));
    CHECK(rep.holds);
  }

  SUBCASE("geometric profile attains the bound with slack") {
    const double q = 0.3;
    const int ell = 2;
    std::vector<double> f(n);
    for (const auto& x : dom.sites())
      f[static_cast<std::size_t>(dom.site_index(x))] =
          std::pow(q, std::floor((8.0 - std::abs(x[0])) / ell));
    const auto rep = radial_descent_bound(dom, f, ell, q, {});
    CHECK(rep.holds);
    CHECK(rep.center_value == doctest::Approx(std::pow(q, 4)));
    CHECK(rep.bound == doctest::Approx(std::pow(q, 4) * rep.max_abs).epsilon(1e-12));
  }
}

TEST_CASE("classify_cube: radius-0 cube degenerates consistently") {
  const auto ens = randelette::make_ensemble(1, randelette::default_decay(1), 40, 1);
  const auto freqs = dynamics::diophantine_frequency(FrequencyKind::golden, 1, 1);
  const ScaleSchedule sched{6, 50.0, 1};
  ClassificationConfig cfg{sched, 1.0, 0, 1};
  const Cube host{{2}, 0};
  EnergyPolicy policy;
  policy.explicit_energies = {0.0};
  const auto rep =
      classify_cube(host, cfg, TorusPoint({0.44}), ThetaSample{7, -1, -1, 0.0},
                    policy, ens, freqs);
  CHECK(rep.cube.radius == 0);
  CHECK(rep.spectrum_min == rep.spectrum_max);  // single eigenvalue g v(u)
  CHECK(rep.localization.vacuous);
  REQUIRE(rep.energies.size() == 1);
  // policy includes the lone eigenvalue: resonant there
  CHECK(rep.policy_resonant_count >= 1);
}

TEST_CASE("classify_cube: free Laplacian is non-localized") {
  const auto ens = randelette::make_ensemble(1, randelette::default_decay(1), 40, 1);
  const auto freqs = dynamics::diophantine_frequency(FrequencyKind::golden, 1, 1);
  const ScaleSchedule sched{6, 1e-9, 1};
  ClassificationConfig cfg{sched, 0.5, 1, 1};
  const Cube host{{0}, 15};
  EnergyPolicy policy;
  policy.use_subcube_eigenvalues = false;  // keep the test cheap
  const auto rep = classify_cube(host, cfg, TorusPoint({0.2}), ThetaSample::zeros(),
                                 policy, ens, freqs);
  CHECK_FALSE(rep.localization.localized);
  CHECK(rep.tunneling.tunneling);  // near-identical sub-spectra at tiny coupling
}
