#include "msalab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace msalab::lattice {

std::int64_t Cube::site_count() const {
  std::int64_t n = 1;
  for (int i = 0; i < dim(); ++i) n *= 2 * static_cast<std::int64_t>(radius) + 1;
  return n;
}

bool Cube::contains(const Site& x) const {
  if (static_cast<int>(x.size()) != dim()) return false;
  for (int i = 0; i < dim(); ++i)
    if (std::abs(x[static_cast<std::size_t>(i)] - center[static_cast<std::size_t>(i)]) > radius)
      return false;
  return true;
}

std::vector<Site> Cube::sites() const {
  std::vector<Site> out;
  out.reserve(static_cast<std::size_t>(site_count()));
  Site x(center.size());
  for (int i = 0; i < dim(); ++i) x[static_cast<std::size_t>(i)] = center[static_cast<std::size_t>(i)] - radius;
  while (true) {
    out.push_back(x);
    int i = dim() - 1;
    while (i >= 0 && x[static_cast<std::size_t>(i)] == center[static_cast<std::size_t>(i)] + radius) {
      x[static_cast<std::size_t>(i)] = center[static_cast<std::size_t>(i)] - radius;
      --i;
    }
    if (i < 0) break;
    ++x[static_cast<std::size_t>(i)];
  }
  return out;
}

std::int64_t Cube::site_index(const Site& x) const {
  std::int64_t idx = 0;
  const std::int64_t width = 2 * static_cast<std::int64_t>(radius) + 1;
  for (int i = 0; i < dim(); ++i) {
    const int off = x[static_cast<std::size_t>(i)] - center[static_cast<std::size_t>(i)] + radius;
    if (off < 0 || off >= width) throw std::out_of_range("site outside cube");
    idx = idx * width + off;
  }
  return idx;
}

int chebyshev(const Site& a, const Site& b) {
  int d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

int manhattan(const Site& a, const Site& b) {
  int d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
  return d;
}

std::vector<Site> inner_boundary(const Cube& c) {
  std::vector<Site> out;
  for (auto& x : c.sites())
    if (chebyshev(x, c.center) == c.radius) out.push_back(x);
  return out;
}

std::vector<std::pair<Site, Site>> boundary(const Cube& c) {
  std::vector<std::pair<Site, Site>> out;
  for (auto& x : inner_boundary(c)) {
    for (int i = 0; i < c.dim(); ++i) {
      for (int s : {-1, +1}) {
        Site y = x;
        y[static_cast<std::size_t>(i)] += s;
        if (!c.contains(y)) out.emplace_back(x, y);
      }
    }
  }
  return out;
}

bool cubes_disjoint(const Cube& a, const Cube& b) {
  return chebyshev(a.center, b.center) > a.radius + b.radius;
}

std::int64_t scale(const ScaleSchedule& s, int k) {
  if (k < -1) throw std::invalid_argument("scale index must be >= -1");
  if (k == -1) return 0;
  if (s.l0 <= 2) throw std::invalid_argument("L_0 must exceed 2");
  std::int64_t L = s.l0;
  for (int j = 1; j <= k; ++j) {
    const double next = std::floor(std::pow(static_cast<double>(L), ScaleSchedule::alpha)) + 1.0;
    if (next > 4.0e18) throw std::overflow_error("scale overflow");
    L = static_cast<std::int64_t>(next);
  }
  return L;
}

double delta(const ScaleSchedule& s, int k) {
  if (k < 0) throw std::invalid_argument("delta defined for k >= 0");
  const double L = static_cast<double>(scale(s, k));
  return std::pow(s.g, -ScaleSchedule::a_exp) * std::exp(-4.0 * std::pow(L, ScaleSchedule::b_exp));
}

double g_delta(const ScaleSchedule& s, int k) {
  if (k < 0) throw std::invalid_argument("g_delta defined for k >= 0");
  const double L = static_cast<double>(scale(s, k));
  return std::pow(s.g, 1.0 - ScaleSchedule::a_exp) *
         std::exp(-4.0 * std::pow(L, ScaleSchedule::b_exp));
}

double covering_radius(const ScaleSchedule& s, int k) {
  return std::pow(delta(s, k), 1.0 + 1.0 / (2.0 * s.nu));
}

double gamma_rate(double m, std::int64_t L) {
  if (m <= 0.0) throw std::invalid_argument("mass m must be > 0");
  if (L < 1) throw std::invalid_argument("gamma_rate needs L >= 1");
  return m * (1.0 + std::pow(static_cast<double>(L), -0.125));
}

CoveringGrid covering_grid(double r, int nu, std::uint64_t max_points) {
  if (!(r > 0.0) || r > 0.5) throw std::invalid_argument("covering radius must lie in (0, 1/2]");
  CoveringGrid g;
  g.r = r;
  const double n_real = std::ceil(1.0 / (2.0 * r));
  g.n_per_coord = n_real > 1.0e18 ? static_cast<std::uint64_t>(0) : static_cast<std::uint64_t>(n_real);
  g.total_count = std::pow(n_real, nu);
  if (g.n_per_coord == 0 || g.total_count > static_cast<double>(max_points)) {
    g.materialized = false;
    return g;
  }
  g.materialized = true;
  const auto N = g.n_per_coord;
  std::vector<std::uint64_t> idx(static_cast<std::size_t>(nu), 0);
  while (true) {
    std::vector<double> coords(static_cast<std::size_t>(nu));
    for (int i = 0; i < nu; ++i)
      coords[static_cast<std::size_t>(i)] =
          dynamics::frac((2.0 * static_cast<double>(idx[static_cast<std::size_t>(i)]) + 1.0) * r);
    g.centers.emplace_back(std::move(coords));
    int i = nu - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == N - 1) {
      idx[static_cast<std::size_t>(i)] = 0;
      --i;
    }
    if (i < 0) break;
    ++idx[static_cast<std::size_t>(i)];
  }
  return g;
}

std::vector<Site> subcube_centers(const Cube& host, int radius, int center_step) {
  if (radius > host.radius) return {};
  if (center_step < 1) throw std::invalid_argument("center step must be >= 1");
  Cube inner{host.center, host.radius - radius};
  std::vector<Site> out;
  for (auto& c : inner.sites()) {
    bool on_grid = true;
    for (int i = 0; i < host.dim(); ++i)
      if ((c[static_cast<std::size_t>(i)] - host.center[static_cast<std::size_t>(i)]) % center_step != 0) {
        on_grid = false;
        break;
      }
    if (on_grid) out.push_back(c);
  }
  return out;
}

std::vector<Site> disjoint_subcube_family(const Cube& host, int radius,
                                          const CenterPredicate& pred,
                                          int center_step, int max_count) {
  std::vector<Site> family;
  const int min_sep = 2 * radius + 1;
  // lexicographic scan; in d = 1 this is the classic right-endpoint greedy
  for (auto& c : subcube_centers(host, radius, center_step)) {
    if (max_count >= 0 && static_cast<int>(family.size()) >= max_count) break;
    if (!pred(c)) continue;
    bool ok = true;
    for (auto& f : family)
      if (chebyshev(c, f) < min_sep) {
        ok = false;
        break;
      }
    if (ok) family.push_back(c);
  }
  return family;
}

}  // namespace msalab::lattice
