#include "msalab/mother.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace msalab::randelette {

double Polynomial::eval(double t) const {
  double v = 0.0;
  for (std::size_t i = c_.size(); i-- > 0;) v = v * t + c_[i];
  return v;
}

Polynomial Polynomial::derivative() const {
  if (c_.size() <= 1) return Polynomial({0.0});
  std::vector<double> d(c_.size() - 1);
  for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * static_cast<double>(i);
  return Polynomial(std::move(d));
}

Polynomial Polynomial::antiderivative() const {
  std::vector<double> a(c_.size() + 1, 0.0);
  for (std::size_t i = 0; i < c_.size(); ++i) a[i + 1] = c_[i] / static_cast<double>(i + 1);
  return Polynomial(std::move(a));
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  std::vector<double> s(std::max(c_.size(), o.c_.size()), 0.0);
  for (std::size_t i = 0; i < c_.size(); ++i) s[i] += c_[i];
  for (std::size_t i = 0; i < o.c_.size(); ++i) s[i] += o.c_[i];
  return Polynomial(std::move(s));
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  if (c_.empty() || o.c_.empty()) return Polynomial({0.0});
  std::vector<double> p(c_.size() + o.c_.size() - 1, 0.0);
  for (std::size_t i = 0; i < c_.size(); ++i)
    for (std::size_t j = 0; j < o.c_.size(); ++j) p[i + j] += c_[i] * o.c_[j];
  return Polynomial(std::move(p));
}

Polynomial Polynomial::compose_affine(double a, double b) const {
  // Horner in the polynomial ring: p(a t + b)
  Polynomial lin({b, a});
  Polynomial out({0.0});
  for (std::size_t i = c_.size(); i-- > 0;)
    out = out * lin + Polynomial::constant(c_[i]);
  return out;
}

double PiecewisePoly::eval(double t) const {
  if (pieces.empty() || t < breaks.front() || t >= breaks.back()) return 0.0;
  auto it = std::upper_bound(breaks.begin(), breaks.end(), t);
  std::size_t idx = static_cast<std::size_t>(it - breaks.begin()) - 1;
  if (idx >= pieces.size()) idx = pieces.size() - 1;
  return pieces[idx].eval(t - breaks[idx]);
}

PiecewisePoly PiecewisePoly::derivative() const {
  PiecewisePoly d;
  d.breaks = breaks;
  d.pieces.reserve(pieces.size());
  for (const auto& p : pieces) d.pieces.push_back(p.derivative());
  return d;
}

double PiecewisePoly::sup_abs(int samples_per_piece) const {
  double s = 0.0;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const double w = breaks[i + 1] - breaks[i];
    for (int j = 0; j <= samples_per_piece; ++j) {
      const double local = w * j / samples_per_piece;
      s = std::max(s, std::fabs(pieces[i].eval(std::min(local, std::nextafter(w, 0.0)))));
    }
  }
  return s;
}

PiecewisePoly cardinal_bspline(int order) {
  if (order < 1 || order > 16) throw std::invalid_argument("bspline order out of range");
  // B_1 = 1 on [0,1); B_p(x) = (x B_{p-1}(x) + (p - x) B_{p-1}(x-1)) / (p-1).
  // Pieces live on [j, j+1) in the local variable s = x - j:
  //   piece_j(s) = ((s + j) cur_j(s) + ((p - j) - s) cur_{j-1}(s)) / (p - 1)
  std::vector<Polynomial> cur = {Polynomial({1.0})};
  for (int p = 2; p <= order; ++p) {
    std::vector<Polynomial> nxt(static_cast<std::size_t>(p), Polynomial({0.0}));
    const double inv = 1.0 / (p - 1);
    for (int j = 0; j < p; ++j) {
      Polynomial acc({0.0});
      if (j < p - 1)
        acc = acc + Polynomial({j * inv, inv}) * cur[static_cast<std::size_t>(j)];
      if (j >= 1)
        acc = acc + Polynomial({(p - j) * inv, -inv}) * cur[static_cast<std::size_t>(j - 1)];
      nxt[static_cast<std::size_t>(j)] = acc;
    }
    cur = std::move(nxt);
  }
  PiecewisePoly out;
  out.breaks.resize(static_cast<std::size_t>(order) + 1);
  for (int j = 0; j <= order; ++j) out.breaks[static_cast<std::size_t>(j)] = j;
  out.pieces = std::move(cur);
  return out;
}

double phi_c1_eval(double t) {
  if (t < 0.0) return 0.0;
  if (t < 1.0) return 0.5 * t * t;
  if (t < 2.0) return 1.0 - 0.5 * (t - 2.0) * (t - 2.0);
  return 1.0;
}

namespace {

// Integral of the order-(M+1) cardinal B-spline rescaled to rise over
// [0, len]; u(0) = 0, u(len) = 1, C^M across breakpoints.  Pieces in local
// coordinates.
PiecewisePoly bspline_ramp(int M, double len) {
  const int order = M + 1;
  PiecewisePoly b = cardinal_bspline(order);
  PiecewisePoly ramp;
  ramp.breaks.resize(b.breaks.size());
  ramp.pieces.resize(b.pieces.size());
  double acc = 0.0;  // integral mass below the current breakpoint
  const double scale = order / len;
  for (std::size_t j = 0; j < b.pieces.size(); ++j) {
    Polynomial anti = b.pieces[j].antiderivative();  // local, anti(0) = 0
    // u(x) = acc + anti(s) with s = x - j; substitute s = scale * tau
    ramp.pieces[j] = (anti + Polynomial::constant(acc)).compose_affine(scale, 0.0);
    ramp.breaks[j] = b.breaks[j] / scale;
    acc += anti.eval(1.0);
  }
  ramp.breaks.back() = b.breaks.back() / scale;
  return ramp;
}

}  // namespace

MotherFunction make_mother(int smoothness) {
  if (smoothness < 1) throw std::invalid_argument("smoothness class must be >= 1");
  MotherFunction m;
  m.smoothness = smoothness;
  if (smoothness == 1) {
    // phi(t) phi(12 - t): ramps [0,2] and [10,12] do not overlap, so the
    // product collapses to explicit quadratic pieces (local coordinates).
    m.poly.breaks = {0.0, 1.0, 2.0, 10.0, 11.0, 12.0};
    m.poly.pieces = {
        Polynomial({0.0, 0.0, 0.5}),    // s^2/2
        Polynomial({0.5, 1.0, -0.5}),   // 1 - (s-1)^2/2
        Polynomial({1.0}),              // plateau
        Polynomial({1.0, 0.0, -0.5}),   // 1 - s^2/2
        Polynomial({0.5, -1.0, 0.5}),   // (1-s)^2/2
    };
    m.plateau_lo = 2.0;
    m.plateau_hi = 10.0;
    m.deriv_sup = 1.0;
  } else {
    const double ramp_len = 3.0;
    const PiecewisePoly up = bspline_ramp(smoothness, ramp_len);
    m.poly.breaks = up.breaks;
    m.poly.pieces = up.pieces;
    m.poly.breaks.push_back(12.0 - ramp_len);
    m.poly.pieces.push_back(Polynomial({1.0}));
    // falling ramp: piece_j(tau) = up_piece_r(w - tau), mirrored order
    for (std::size_t j = 0; j < up.pieces.size(); ++j) {
      const std::size_t r = up.pieces.size() - 1 - j;
      const double w = up.breaks[r + 1] - up.breaks[r];
      m.poly.pieces.push_back(up.pieces[r].compose_affine(-1.0, w));
      m.poly.breaks.push_back(12.0 - up.breaks[r]);
    }
    m.plateau_lo = ramp_len;
    m.plateau_hi = 12.0 - ramp_len;
    m.deriv_sup = m.poly.derivative().sup_abs();
  }
  m.dpoly = m.poly.derivative();
  return m;
}

}  // namespace msalab::randelette
