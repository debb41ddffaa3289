#include "msalab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "msalab/rng.hpp"

namespace msalab::stats {

WilsonInterval wilson(std::int64_t count, std::int64_t n, double z) {
  WilsonInterval w;
  if (n <= 0) return w;
  const double p = static_cast<double>(count) / static_cast<double>(n);
  w.p = p;
  const double z2n = z * z / static_cast<double>(n);
  const double center = (p + z2n / 2.0) / (1.0 + z2n);
  const double half =
      z * std::sqrt(p * (1.0 - p) / static_cast<double>(n) + z2n / (4.0 * n)) /
      (1.0 + z2n);
  w.lo = std::max(0.0, center - half);
  w.hi = std::min(1.0, center + half);
  return w;
}

FitResult fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  FitResult f;
  f.n_points = static_cast<int>(x.size());
  if (x.size() != y.size() || x.size() < 2) return f;
  const auto n = static_cast<double>(x.size());
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom <= 0) return f;
  f.slope = (n * sxy - sx * sy) / denom;
  f.intercept = (sy - f.slope * sx) / n;
  double ss_res = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = ly[i] - (f.intercept + f.slope * lx[i]);
    ss_res += r * r;
  }
  if (x.size() > 2) {
    const double var = ss_res / (n - 2.0) / (sxx - sx * sx / n);
    f.slope_stderr = std::sqrt(std::max(0.0, var));
  }
  f.slope_ci = 1.959963984540054 * f.slope_stderr;
  f.valid = true;
  return f;
}

ScalingFit make_scaling_fit(const std::vector<double>& grid,
                            const std::vector<std::int64_t>& counts, std::int64_t n,
                            int min_successes) {
  ScalingFit sf;
  sf.min_successes = min_successes;
  std::vector<double> fx, fy;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    ScalingPoint pt;
    pt.abscissa = grid[i];
    pt.count = counts[i];
    pt.n = n;
    pt.ci = wilson(counts[i], n);
    sf.points.push_back(pt);
    if (counts[i] >= min_successes && grid[i] > 0.0) {
      fx.push_back(grid[i]);
      fy.push_back(pt.ci.p);
    }
  }
  sf.fit = fit_loglog(fx, fy);
  return sf;
}

namespace {

constexpr std::uint64_t kSampleTag = 0x5eedull;
constexpr std::uint64_t kOmegaTag = 0xaull;
constexpr std::uint64_t kThetaTag = 0xbull;

Cube origin_cube(int radius, int d) {
  return Cube{lattice::Site(static_cast<std::size_t>(d), 0), radius};
}

}  // namespace

TorusPoint sample_omega(std::uint64_t seed_base, std::int64_t index, int nu) {
  const std::uint64_t s = hash_key(seed_base, static_cast<std::uint64_t>(index), kSampleTag);
  std::vector<double> coords(static_cast<std::size_t>(nu));
  for (int i = 0; i < nu; ++i)
    coords[static_cast<std::size_t>(i)] = u01(hash_key(s, kOmegaTag, static_cast<std::uint64_t>(i)));
  return TorusPoint(std::move(coords));
}

ThetaSample sample_theta(std::uint64_t seed_base, std::int64_t index) {
  const std::uint64_t s = hash_key(seed_base, static_cast<std::uint64_t>(index), kSampleTag);
  return ThetaSample{hash_key(s, kThetaTag, 0), -1, -1, 0.0};
}

std::vector<double> wegner_distances(const RandeletteEnsemble& ens,
                                     const FrequencyMatrix& freqs,
                                     const WegnerParams& p, const McParams& mc) {
  const Cube cube = origin_cube(p.cube_radius, p.d);
  return sample_map<double>(mc.samples, mc.threads, [&](std::int64_t i) {
    const auto omega = sample_omega(mc.seed_base, i, ens.nu);
    const auto theta = sample_theta(mc.seed_base, i);
    const auto h = spectral::assemble(cube, omega, theta, p.g, ens, freqs);
    const Eigen::VectorXd evals = spectral::eigenvalues_only(h);
    return (evals.array() - p.energy).abs().minCoeff();
  });
}

ScalingFit wegner_scan(const RandeletteEnsemble& ens, const FrequencyMatrix& freqs,
                       const WegnerParams& p, const McParams& mc) {
  const auto dists = wegner_distances(ens, freqs, p, mc);
  std::vector<std::int64_t> counts(p.s_grid.size(), 0);
  for (double d : dists)
    for (std::size_t i = 0; i < p.s_grid.size(); ++i)
      if (d <= p.s_grid[i]) ++counts[i];
  return make_scaling_fit(p.s_grid, counts, mc.samples);
}

ScalingFit minami_scan(const RandeletteEnsemble& ens, const FrequencyMatrix& freqs,
                       const MinamiParams& p, const McParams& mc) {
  const Cube cube = origin_cube(p.cube_radius, p.d);
  // per-sample eigenvalue counts inside each centered interval
  const auto counts_per_sample = sample_map<std::vector<int>>(
      mc.samples, mc.threads, [&](std::int64_t i) {
        const auto omega = sample_omega(mc.seed_base, i, ens.nu);
        const auto theta = sample_theta(mc.seed_base, i);
        const auto h = spectral::assemble(cube, omega, theta, p.g, ens, freqs);
        const Eigen::VectorXd evals = spectral::eigenvalues_only(h);
        std::vector<int> c(p.interval_grid.size(), 0);
        for (std::size_t w = 0; w < p.interval_grid.size(); ++w) {
          const double half = p.interval_grid[w] / 2.0;
          for (Eigen::Index j = 0; j < evals.size(); ++j)
            if (std::fabs(evals(j) - p.center_energy) <= half) ++c[w];
        }
        return c;
      });
  std::vector<std::int64_t> counts(p.interval_grid.size(), 0);
  for (const auto& c : counts_per_sample)
    for (std::size_t w = 0; w < c.size(); ++w)
      if (c[w] >= p.j) ++counts[w];
  return make_scaling_fit(p.interval_grid, counts, mc.samples);
}

SpacingHistogram spacing_histogram(const RandeletteEnsemble& ens,
                                   const FrequencyMatrix& freqs, int cube_radius,
                                   int d, double g, int bins, double max_spacing,
                                   const McParams& mc) {
  const Cube cube = origin_cube(cube_radius, d);
  struct Draw {
    std::vector<double> spacings;
    bool degenerate;
  };
  const auto draws = sample_map<Draw>(mc.samples, mc.threads, [&](std::int64_t i) {
    const auto omega = sample_omega(mc.seed_base, i, ens.nu);
    const auto theta = sample_theta(mc.seed_base, i);
    const auto h = spectral::assemble(cube, omega, theta, g, ens, freqs);
    const Eigen::VectorXd evals = spectral::eigenvalues_only(h);
    Draw dr;
    dr.spacings.reserve(static_cast<std::size_t>(evals.size()) - 1);
    const double scale = std::max(1.0, evals.cwiseAbs().maxCoeff());
    double mn = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j + 1 < evals.size(); ++j) {
      const double s = evals(j + 1) - evals(j);
      dr.spacings.push_back(s);
      mn = std::min(mn, s);
    }
    dr.degenerate = mn <= 1e-12 * scale;
    return dr;
  });

  SpacingHistogram hist;
  hist.n_samples = mc.samples;
  hist.edges.resize(static_cast<std::size_t>(bins) + 1);
  for (int b = 0; b <= bins; ++b)
    hist.edges[static_cast<std::size_t>(b)] = max_spacing * b / bins;
  std::vector<std::int64_t> binc(static_cast<std::size_t>(bins), 0);
  double mn = std::numeric_limits<double>::infinity();
  for (const auto& dr : draws) {
    if (dr.degenerate) ++hist.degenerate_samples;
    for (double s : dr.spacings) {
      mn = std::min(mn, s);
      int b = static_cast<int>(std::floor(s / max_spacing * bins));
      b = std::clamp(b, 0, bins - 1);  // clamp outliers into the edge bins
      ++binc[static_cast<std::size_t>(b)];
      ++hist.n_spacings;
    }
  }
  hist.min_spacing = mn;
  hist.mass.resize(static_cast<std::size_t>(bins));
  for (int b = 0; b < bins; ++b)
    hist.mass[static_cast<std::size_t>(b)] =
        static_cast<double>(binc[static_cast<std::size_t>(b)]) /
        static_cast<double>(std::max<std::int64_t>(1, hist.n_spacings));
  return hist;
}

TunnelingResult tunneling_probability(const RandeletteEnsemble& ens,
                                      const FrequencyMatrix& freqs, int l0, int k,
                                      const std::vector<double>& g_list,
                                      const McParams& mc) {
  TunnelingResult res;
  for (double g : g_list) {
    const lattice::ScaleSchedule sched{l0, g, ens.nu};
    msa::ClassificationConfig cfg{sched, 1.0, k, 1};
    const Cube host = origin_cube(static_cast<int>(lattice::scale(sched, k)),
                                  freqs.lattice_dim());
    auto ind = sample_map<char>(mc.samples, mc.threads, [&](std::int64_t i) {
      const auto omega = sample_omega(mc.seed_base, i, ens.nu);
      const auto theta = sample_theta(mc.seed_base, i);
      msa::CubeState state(host, omega, theta, g, &ens, &freqs);
      return static_cast<char>(msa::is_tunneling(host, cfg, state).tunneling ? 1 : 0);
    });
    ProbRow row;
    row.g = g;
    row.k = k;
    row.event = "tunneling";
    row.n = mc.samples;
    for (char c : ind) row.count += c;
    row.ci = wilson(row.count, row.n);
    res.rows.push_back(row);
    res.indicator.push_back(std::move(ind));
  }
  return res;
}

LocalizationResult localization_probability(const RandeletteEnsemble& ens,
                                            const FrequencyMatrix& freqs, int l0,
                                            double m, int k,
                                            const std::vector<double>& g_list,
                                            const McParams& mc) {
  LocalizationResult res;
  struct Draw {
    char non_localized;
    double mhat;
  };
  for (double g : g_list) {
    const lattice::ScaleSchedule sched{l0, g, ens.nu};
    msa::ClassificationConfig cfg{sched, m, k, 1};
    const Cube host = origin_cube(static_cast<int>(lattice::scale(sched, k)),
                                  freqs.lattice_dim());
    const double min_dist = std::pow(static_cast<double>(host.radius), 7.0 / 8.0);
    auto draws = sample_map<Draw>(mc.samples, mc.threads, [&](std::int64_t i) {
      const auto omega = sample_omega(mc.seed_base, i, ens.nu);
      const auto theta = sample_theta(mc.seed_base, i);
      const auto h = spectral::assemble(host, omega, theta, g, ens, freqs);
      const auto spec = spectral::spectrum(h);
      const auto verdict = msa::is_localized(spec, host, cfg);
      // decay-mass estimate: the worst pair product converted to a rate
      double mhat = std::numeric_limits<double>::infinity();
      const auto sites = host.sites();
      for (std::size_t a = 0; a < sites.size(); ++a)
        for (std::size_t b = a + 1; b < sites.size(); ++b) {
          const int dist = lattice::chebyshev(sites[a], sites[b]);
          if (static_cast<double>(dist) < min_dist) continue;
          const auto ia = static_cast<Eigen::Index>(host.site_index(sites[a]));
          const auto ib = static_cast<Eigen::Index>(host.site_index(sites[b]));
          for (Eigen::Index j = 0; j < spec.evals.size(); ++j) {
            const double v = std::max(std::fabs(spec.evecs(ia, j) * spec.evecs(ib, j)),
                                      1e-300);
            mhat = std::min(mhat, -std::log(v) / dist);
          }
        }
      return Draw{static_cast<char>(verdict.localized ? 0 : 1), mhat};
    });
    ProbRow row;
    row.g = g;
    row.k = k;
    row.event = "non_localized";
    row.n = mc.samples;
    std::vector<char> ind(draws.size());
    std::vector<double> mh(draws.size());
    for (std::size_t i = 0; i < draws.size(); ++i) {
      ind[i] = draws[i].non_localized;
      mh[i] = draws[i].mhat;
      row.count += draws[i].non_localized;
    }
    row.ci = wilson(row.count, row.n);
    res.rows.push_back(row);
    res.non_localized.push_back(std::move(ind));
    res.mhat.push_back(std::move(mh));
  }
  return res;
}

SignTest paired_sign_test(const std::vector<double>& a, const std::vector<double>& b) {
  SignTest t;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
    if (a[i] > b[i])
      ++t.wins;
    else if (a[i] < b[i])
      ++t.losses;
    else
      ++t.ties;
  }
  const int n = t.wins + t.losses;
  if (n == 0) {
    t.p_value = 1.0;
    return t;
  }
  // P(W >= wins) under Binomial(n, 1/2), via log binomial coefficients
  double p = 0.0;
  for (int w = t.wins; w <= n; ++w) {
    const double logc = std::lgamma(n + 1.0) - std::lgamma(w + 1.0) -
                        std::lgamma(static_cast<double>(n - w) + 1.0);
    p += std::exp(logc - n * std::log(2.0));
  }
  t.p_value = std::min(1.0, p);
  t.significant_95 = t.p_value <= 0.05;
  return t;
}

}  // namespace msalab::stats
