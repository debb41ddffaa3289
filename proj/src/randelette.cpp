#include "msalab/randelette.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "msalab/lattice.hpp"
#include "msalab/rng.hpp"

namespace msalab::randelette {

namespace {

constexpr double kLn2 = 0.6931471805599453;

enum class GenKind { constant, unit_support, standard };

// Per-coordinate copy geometry of one generation.
struct GenGeometry {
  GenKind kind;
  std::int64_t copies;  // per coordinate
  double step;          // shift between consecutive copies
  double scale;         // mother argument = scale * (t - shift)
};

GenGeometry geometry(int n) {
  if (n <= 2) return {GenKind::constant, 1, 1.0, 0.0};
  if (n == 3) return {GenKind::unit_support, 2, 0.5, 12.0};
  return {GenKind::standard, std::int64_t{1} << (n - 2), std::exp2(2 - n),
          std::exp2(n)};
}

struct Candidate {
  std::int64_t k;  // 1-based per-coordinate index
  double arg;      // mother argument
};

// Copies whose (half-open) support window contains t, ascending in k.
void covering_candidates(const GenGeometry& g, const MotherFunction& mother,
                         double t, std::vector<Candidate>& out) {
  out.clear();
  t = dynamics::frac(t);
  switch (g.kind) {
    case GenKind::constant:
      out.push_back({1, -1.0});  // value is identically 1; arg unused
      return;
    case GenKind::unit_support:
      out.push_back({1, 12.0 * t});
      out.push_back({2, 12.0 * dynamics::frac(t - 0.5)});
      return;
    case GenKind::standard: {
      const auto j0 = static_cast<std::int64_t>(std::floor(t / g.step));
      for (std::int64_t dj = 2; dj >= 0; --dj) {
        std::int64_t j = (j0 - dj) % g.copies;
        if (j < 0) j += g.copies;
        const double d = dynamics::frac(t - static_cast<double>(j) * g.step);
        const double arg = g.scale * d;
        if (arg < mother.support_len) out.push_back({j + 1, arg});
      }
      std::sort(out.begin(), out.end(),
                [](const Candidate& a, const Candidate& b) { return a.k < b.k; });
      return;
    }
  }
}

}  // namespace

double RandeletteEnsemble::amplitude(int n) const { return std::exp(-decay_c * n); }

std::int64_t RandeletteEnsemble::copies_1d(int n) const { return geometry(n).copies; }

std::int64_t RandeletteEnsemble::copies(int n) const {
  std::int64_t k = 1;
  for (int i = 0; i < nu; ++i) k *= copies_1d(n);
  return k;
}

double RandeletteEnsemble::tail_bound() const {
  return overlap_bound * std::exp(-decay_c * (n_max + 1)) / (1.0 - std::exp(-decay_c));
}

double RandeletteEnsemble::gradient_bound() const {
  // sum over n of a_n * K' * (argument scale) * sup|Phi'|; generations 0..2
  // are constant, generation 3 carries scale 12, the rest scale 2^n.  The
  // geometric part converges because c > ln 2.
  const double q = 2.0 * std::exp(-decay_c);
  const double tail = std::pow(q, 4) / (1.0 - q);
  return overlap_bound * mother.deriv_sup * (12.0 * std::exp(-3.0 * decay_c) + tail);
}

double default_decay(int smoothness) { return (smoothness + 1) * kLn2 + 0.5; }

RandeletteEnsemble make_ensemble(int smoothness, double decay_c, int n_max, int nu) {
  if (n_max < 4) throw std::invalid_argument("ensemble needs n_max >= 4");
  if (nu < 1) throw std::invalid_argument("phase dimension must be >= 1");
  if (!(decay_c > kLn2 * std::max(1, smoothness)))
    throw std::invalid_argument(
        "decay rate too small: need c > ln2 * max(1, M) for C^M convergence");
  RandeletteEnsemble ens;
  ens.mother = make_mother(smoothness);
  ens.decay_c = decay_c;
  ens.n_max = n_max;
  ens.nu = nu;
  ens.overlap_bound = 1;
  for (int i = 0; i < nu; ++i) ens.overlap_bound *= 3;
  return ens;
}

double ThetaSample::coeff(int n, std::int64_t k) const {
  if (n == override_n && k == override_k) return override_value;
  if (all_zero) return 0.0;
  return u01(hash_key(seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(k)));
}

ThetaSample ThetaSample::with_override(int n, std::int64_t k, double value) const {
  ThetaSample t = *this;
  t.override_n = n;
  t.override_k = k;
  t.override_value = value;
  return t;
}

ThetaSample ThetaSample::zeros() {
  ThetaSample t;
  t.all_zero = true;
  return t;
}

double randelette_eval(const RandeletteEnsemble& ens, int n, std::int64_t k,
                       const TorusPoint& omega) {
  if (n < 0 || n > ens.n_max) throw std::out_of_range("generation out of range");
  if (omega.dim() != ens.nu) throw std::invalid_argument("phase dimension mismatch");
  const GenGeometry g = geometry(n);
  std::int64_t total = 1;
  for (int i = 0; i < ens.nu; ++i) total *= g.copies;
  if (k < 1 || k > total) throw std::out_of_range("randelette index out of range");
  if (g.kind == GenKind::constant) return 1.0;
  // decode flat index, coordinate 0 most significant
  std::int64_t rem = k - 1;
  double v = 1.0;
  for (int i = ens.nu - 1; i >= 0; --i) {
    const std::int64_t ki = rem % g.copies;
    rem /= g.copies;
    const double d = dynamics::frac(omega[i] - static_cast<double>(ki) * g.step);
    v *= ens.mother.eval(g.scale * d);
    if (v == 0.0) return 0.0;
  }
  return v;
}

int overlap_count(const RandeletteEnsemble& ens, int n, const TorusPoint& omega) {
  const GenGeometry g = geometry(n);
  std::vector<Candidate> cand;
  int count = 1;
  for (int i = 0; i < ens.nu; ++i) {
    covering_candidates(g, ens.mother, omega[i], cand);
    count *= static_cast<int>(cand.size());
  }
  return count;
}

std::int64_t plateau_covering_index(const RandeletteEnsemble& ens, int n, double t) {
  const GenGeometry g = geometry(n);
  if (g.kind == GenKind::constant) return 1;
  std::vector<Candidate> cand;
  covering_candidates(g, ens.mother, t, cand);
  for (const auto& c : cand)
    if (c.arg >= ens.mother.plateau_lo && c.arg <= ens.mother.plateau_hi) return c.k;
  throw std::logic_error("plateau coverage violated");  // excluded by construction
}

namespace {

// Enumerates the covering tensor combos of omega for one generation in
// deterministic per-coordinate lexicographic order and applies fn(flat_k,
// per-coordinate candidates).
template <typename Fn>
void for_each_covering(const RandeletteEnsemble& ens, int n, const TorusPoint& omega,
                       Fn&& fn) {
  const GenGeometry g = geometry(n);
  std::vector<std::vector<Candidate>> cands(static_cast<std::size_t>(ens.nu));
  for (int i = 0; i < ens.nu; ++i)
    covering_candidates(g, ens.mother, omega[i], cands[static_cast<std::size_t>(i)]);
  std::vector<std::size_t> pick(static_cast<std::size_t>(ens.nu), 0);
  while (true) {
    std::int64_t flat = 0;
    for (int i = 0; i < ens.nu; ++i)
      flat = flat * g.copies + (cands[static_cast<std::size_t>(i)][pick[static_cast<std::size_t>(i)]].k - 1);
    fn(flat + 1, g, cands, pick);
    int i = ens.nu - 1;
    while (i >= 0 && pick[static_cast<std::size_t>(i)] + 1 == cands[static_cast<std::size_t>(i)].size()) {
      pick[static_cast<std::size_t>(i)] = 0;
      --i;
    }
    if (i < 0) break;
    ++pick[static_cast<std::size_t>(i)];
  }
}

double candidate_value(const RandeletteEnsemble& ens, const GenGeometry& g,
                       const Candidate& c) {
  return g.kind == GenKind::constant ? 1.0 : ens.mother.eval(c.arg);
}

double candidate_deriv(const RandeletteEnsemble& ens, const GenGeometry& g,
                       const Candidate& c) {
  return g.kind == GenKind::constant ? 0.0 : ens.mother.deriv(c.arg) * g.scale;
}

}  // namespace

double hull_eval(const RandeletteEnsemble& ens, const ThetaSample& theta,
                 const TorusPoint& omega) {
  if (omega.dim() != ens.nu) throw std::invalid_argument("phase dimension mismatch");
  double v = 0.0;
  for (int n = 0; n <= ens.n_max; ++n) {
    const double a = ens.amplitude(n);
    for_each_covering(ens, n, omega,
                      [&](std::int64_t flat, const GenGeometry& g, const auto& cands,
                          const auto& pick) {
                        double val = 1.0;
                        for (int i = 0; i < ens.nu; ++i)
                          val *= candidate_value(
                              ens, g, cands[static_cast<std::size_t>(i)][pick[static_cast<std::size_t>(i)]]);
                        v += a * theta.coeff(n, flat) * val;
                      });
  }
  return v;
}

std::vector<double> hull_gradient(const RandeletteEnsemble& ens,
                                  const ThetaSample& theta,
                                  const TorusPoint& omega) {
  if (omega.dim() != ens.nu) throw std::invalid_argument("phase dimension mismatch");
  std::vector<double> grad(static_cast<std::size_t>(ens.nu), 0.0);
  for (int n = 0; n <= ens.n_max; ++n) {
    const double a = ens.amplitude(n);
    for_each_covering(
        ens, n, omega,
        [&](std::int64_t flat, const GenGeometry& g, const auto& cands, const auto& pick) {
          const double w = a * theta.coeff(n, flat);
          for (int i = 0; i < ens.nu; ++i) {
            double term = w;
            for (int j = 0; j < ens.nu; ++j) {
              const auto& c = cands[static_cast<std::size_t>(j)][pick[static_cast<std::size_t>(j)]];
              term *= (j == i) ? candidate_deriv(ens, g, c) : candidate_value(ens, g, c);
            }
            grad[static_cast<std::size_t>(i)] += term;
          }
        });
  }
  return grad;
}

SeparationGeneration separation_generation(std::int64_t cube_radius, double A, double C) {
  if (cube_radius < 2) throw std::invalid_argument("separation generation needs L >= 2");
  if (!(A > 0.0) || !(C > 0.0)) throw std::invalid_argument("need A > 0 and C > 0");
  SeparationGeneration s;
  s.a_coef = A / kLn2;
  s.b_coef = A + 5.0 - std::log(C) / kLn2;
  s.n_raw = s.a_coef * std::log(static_cast<double>(cube_radius)) + s.b_coef;
  s.n_min = static_cast<int>(std::floor(s.n_raw)) + 1;
  return s;
}

namespace {

// Do some generation-n support windows contain both circle points?  Tested per
// coordinate; a tensor window exists iff every coordinate admits a common
// window.
bool common_window_1d(const RandeletteEnsemble& ens, const GenGeometry& g, double p,
                      double q) {
  if (g.kind == GenKind::constant) return true;
  std::vector<Candidate> cand;
  covering_candidates(g, ens.mother, p, cand);
  for (const auto& c : cand) {
    const double shift = static_cast<double>(c.k - 1) * g.step;
    const double dq = dynamics::frac(dynamics::frac(q) - shift);
    if (g.scale * dq < ens.mother.support_len) return true;
  }
  return false;
}

}  // namespace

bool support_separation_check(const RandeletteEnsemble& ens,
                              const FrequencyMatrix& freqs,
                              const lattice::Cube& cube, const TorusPoint& omega,
                              int N) {
  if (N > ens.n_max) throw std::invalid_argument("N exceeds ensemble truncation");
  const auto sites = cube.sites();
  std::vector<TorusPoint> pts;
  pts.reserve(sites.size());
  for (const auto& x : sites) pts.push_back(dynamics::translate(omega, x, freqs));
  for (std::size_t a = 0; a < pts.size(); ++a) {
    for (std::size_t b = a + 1; b < pts.size(); ++b) {
      for (int n = std::max(N, 0); n <= ens.n_max; ++n) {
        const GenGeometry g = geometry(n);
        bool shared = true;
        for (int i = 0; i < ens.nu && shared; ++i)
          shared = common_window_1d(ens, g, pts[a][i], pts[b][i]);
        if (shared) return false;
      }
    }
  }
  return true;
}

LvbReport lvb_experiment(const RandeletteEnsemble& ens, const FrequencyMatrix& freqs,
                         const lattice::Cube& cube, const std::vector<int>& site,
                         const TorusPoint& omega, int trials, std::uint64_t rng_seed,
                         const dynamics::UsrCertificate& cert) {
  if (!cube.contains(site)) throw std::invalid_argument("site not in cube");
  if (cert.c_min <= 0.0)
    throw std::invalid_argument("LVB experiment needs a positive USR constant");
  const auto sep = separation_generation(cube.radius, cert.exponent_a, cert.c_min);
  if (sep.n_min > ens.n_max)
    throw std::invalid_argument("ensemble truncation below separation generation");

  LvbReport rep;
  rep.n_used = sep.n_min;

  const TorusPoint px = dynamics::translate(omega, site, freqs);
  const GenGeometry g = geometry(rep.n_used);
  std::int64_t flat = 0;
  for (int i = 0; i < ens.nu; ++i)
    flat = flat * g.copies + (plateau_covering_index(ens, rep.n_used, px[i]) - 1);
  rep.k_star = flat + 1;

  std::vector<double> tvals = {0.0, 1.0};
  for (int j = 0; j < trials; ++j)
    tvals.push_back(u01(hash_key(rng_seed, 0x11bull, static_cast<std::uint64_t>(j))));

  const ThetaSample base{rng_seed, -1, -1, 0.0};
  const auto sites = cube.sites();

  rep.frozen_ok = true;
  std::vector<double> vx(tvals.size());
  for (const auto& y : sites) {
    const TorusPoint py = dynamics::translate(omega, y, freqs);
    const bool is_x = (y == site);
    double v0 = 0.0;
    for (std::size_t t = 0; t < tvals.size(); ++t) {
      const double v =
          hull_eval(ens, base.with_override(rep.n_used, rep.k_star, tvals[t]), py);
      if (is_x) vx[t] = v;
      if (t == 0) v0 = v;
      if (!is_x && v != v0) rep.frozen_ok = false;
    }
  }

  rep.slope = vx[1] - vx[0];
  rep.slope_expected = ens.amplitude(rep.n_used);
  for (std::size_t t = 0; t < tvals.size(); ++t)
    rep.max_affine_residual =
        std::max(rep.max_affine_residual, std::fabs(vx[t] - (vx[0] + rep.slope * tvals[t])));
  rep.density_bound = 1.0 / rep.slope;
  return rep;
}

}  // namespace msalab::randelette
