#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "msalab/dynamics.hpp"

namespace msalab::lattice {

using Site = std::vector<int>;

/// Max-norm ball (cube) of the given radius around a center in Z^d.
struct Cube {
  Site center;
  int radius = 0;

  int dim() const { return static_cast<int>(center.size()); }
  std::int64_t site_count() const;
  bool contains(const Site& x) const;
  /// Lexicographic enumeration of all sites.
  std::vector<Site> sites() const;
  /// Flat lexicographic index of a contained site.
  std::int64_t site_index(const Site& x) const;
};

/// max-norm distance between lattice points.
int chebyshev(const Site& a, const Site& b);
/// l1 distance between lattice points.
int manhattan(const Site& a, const Site& b);

/// Sites of the cube at max-norm distance exactly radius from the center.
std::vector<Site> inner_boundary(const Cube& c);

/// Nearest-neighbor pairs (x, y) with x in the cube, y outside.
std::vector<std::pair<Site, Site>> boundary(const Cube& c);

/// Two cubes of equal dimension are disjoint iff their centers are farther
/// than the sum of radii in max-norm.
bool cubes_disjoint(const Cube& a, const Cube& b);

/// The multi-scale schedule: L_k = floor(L_{k-1}^{3/2}) + 1 with L_{-1} = 0,
/// resonance widths delta_k = g^{-1/2} exp(-4 sqrt(L_k)), covering radii
/// r_k = delta_k^{1 + 1/(2 nu)}, and the cluster threshold J_nu = nu + 2.
struct ScaleSchedule {
  int l0 = 3;
  double g = 1.0;
  int nu = 1;

  static constexpr double alpha = 1.5;
  static constexpr double a_exp = 0.5;  // delta_k = g^{-a} e^{-4 L_k^b}
  static constexpr double b_exp = 0.5;

  int j_nu() const { return nu + 2; }
};

/// L_k; scale(-1) = 0.  Throws on overflow at absurd k.
std::int64_t scale(const ScaleSchedule& s, int k);
double delta(const ScaleSchedule& s, int k);
/// g * delta_k = g^{1/2} exp(-4 sqrt(L_k)), the resonance width at level k.
double g_delta(const ScaleSchedule& s, int k);
double covering_radius(const ScaleSchedule& s, int k);  // r_k

/// gamma(m, L) = m (1 + L^{-1/8}) > m.
double gamma_rate(double m, std::int64_t L);

struct CoveringGrid {
  double r = 0.0;
  std::uint64_t n_per_coord = 0;      // N = ceil(1/(2r))
  double total_count = 0.0;           // N^nu, may exceed any integer type
  bool materialized = false;
  std::vector<dynamics::TorusPoint> centers;  // filled iff materialized
};

/// Odd-multiples-of-r grid ((2l+1) r per coordinate) covering the torus within
/// sup-distance r.  Enumerates the centers only when N^nu <= max_points;
/// otherwise reports the size.
CoveringGrid covering_grid(double r, int nu, std::uint64_t max_points = 1u << 20);

using CenterPredicate = std::function<bool(const Site&)>;

/// Greedy family of pairwise disjoint radius-`radius` sub-cubes of the host
/// whose centers satisfy the predicate; centers walk the lexicographic grid
/// with the given step.  In d = 1 the greedy (right-endpoint) count is the
/// exact maximum; in d >= 2 it is a certified lower bound.
std::vector<Site> disjoint_subcube_family(const Cube& host, int radius,
                                          const CenterPredicate& pred,
                                          int center_step = 1,
                                          int max_count = -1);

/// Candidate sub-cube centers: all c with ||c - u|| <= host.radius - radius on
/// the step grid.
std::vector<Site> subcube_centers(const Cube& host, int radius, int center_step = 1);

}  // namespace msalab::lattice
