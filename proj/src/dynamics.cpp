#include "msalab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "msalab/rng.hpp"

namespace msalab::dynamics {

double frac(double t) {
  double f = t - std::floor(t);
  if (f >= 1.0) f = 0.0;  // guard against floor rounding at the seam
  return f;
}

TorusPoint::TorusPoint(std::vector<double> coords) : coords_(std::move(coords)) {
  for (double& c : coords_) c = frac(c);
}

TorusPoint TorusPoint::zero(int nu) {
  return TorusPoint(std::vector<double>(static_cast<std::size_t>(nu), 0.0));
}

TorusPoint TorusPoint::shifted_by(const TorusPoint& other) const {
  if (dim() != other.dim())
    throw std::invalid_argument("TorusPoint dimension mismatch");
  std::vector<double> out(coords_.size());
  for (std::size_t i = 0; i < coords_.size(); ++i)
    out[i] = frac(coords_[i] + other.coords_[i]);
  return TorusPoint(std::move(out));
}

TorusPoint rotation_offset(const LatticeVector& x, const FrequencyMatrix& freqs) {
  if (static_cast<int>(x.size()) != freqs.lattice_dim())
    throw std::invalid_argument("lattice vector does not match frequency count");
  const int nu = freqs.phase_dim();
  std::vector<double> out(static_cast<std::size_t>(nu), 0.0);
  for (std::size_t j = 0; j < x.size(); ++j)
    for (int i = 0; i < nu; ++i) out[static_cast<std::size_t>(i)] += x[j] * freqs.alphas[j][i];
  for (double& c : out) c = frac(c);
  return TorusPoint(std::move(out));
}

TorusPoint translate(const TorusPoint& omega, const LatticeVector& x,
                     const FrequencyMatrix& freqs) {
  if (omega.dim() != freqs.phase_dim())
    throw std::invalid_argument("phase point does not match frequency dimension");
  return omega.shifted_by(rotation_offset(x, freqs));
}

double torus_distance(const TorusPoint& a, const TorusPoint& b) {
  if (a.dim() != b.dim())
    throw std::invalid_argument("torus_distance dimension mismatch");
  double d = 0.0;
  for (int i = 0; i < a.dim(); ++i) {
    double u = std::fabs(a[i] - b[i]);
    d = std::max(d, std::min(u, 1.0 - u));
  }
  return d;
}

namespace {

// Odometer over n in [-R, R]^d \ {0}.  For the certificate only the mod-1
// offset matters, and dist(n) == dist(-n), so scan the half-space where the
// leading nonzero coordinate is positive.
bool next_half_space(LatticeVector& n, std::int64_t R) {
  for (std::size_t i = n.size(); i-- > 0;) {
    if (n[i] < R) {
      ++n[i];
      for (std::size_t j = i + 1; j < n.size(); ++j) n[j] = -static_cast<int>(R);
      // skip vectors whose leading nonzero coordinate is negative
      std::size_t lead = 0;
      while (lead < n.size() && n[lead] == 0) ++lead;
      if (lead == n.size()) return next_half_space(n, R);
      if (n[lead] < 0) return next_half_space(n, R);
      return true;
    }
  }
  return false;
}

}  // namespace

UsrCertificate usr_certificate(const FrequencyMatrix& freqs, double exponent_a,
                               std::int64_t range) {
  if (exponent_a <= 0.0) throw std::invalid_argument("USR exponent A must be > 0");
  if (range < 1) throw std::invalid_argument("USR range must be >= 1");
  const int d = freqs.lattice_dim();
  const TorusPoint origin = TorusPoint::zero(freqs.phase_dim());

  UsrCertificate cert;
  cert.exponent_a = exponent_a;
  cert.range = range;

  double best = std::numeric_limits<double>::infinity();
  LatticeVector best_n;
  LatticeVector n(static_cast<std::size_t>(d), 0);
  n[0] = 1;
  for (std::size_t j = 1; j < n.size(); ++j) n[j] = -static_cast<int>(range);
  do {
    std::int64_t norm = 0;
    for (int c : n) norm = std::max<std::int64_t>(norm, std::llabs(c));
    if (norm == 0 || norm > range) continue;
    const double dist = torus_distance(rotation_offset(n, freqs), origin);
    const double val = dist * std::pow(static_cast<double>(norm), exponent_a);
    if (val < best) {
      best = val;
      best_n = n;
    }
    if (best == 0.0) break;  // exact return, certificate fails outright
  } while (next_half_space(n, range));

  cert.c_min = best / 4.0;
  cert.argmin = best_n;
  return cert;
}

UsrCertificate usr_certificate_at(const TorusPoint& omega,
                                  const FrequencyMatrix& freqs,
                                  double exponent_a, std::int64_t range) {
  if (omega.dim() != freqs.phase_dim())
    throw std::invalid_argument("phase point does not match frequency dimension");
  // dist(T^x omega, T^y omega) depends on x - y only; the base point drops out.
  return usr_certificate(freqs, exponent_a, range);
}

DivCertificate div_certificate(const FrequencyMatrix& freqs, std::int64_t range,
                               int trials, std::uint64_t rng_seed) {
  if (range < 0) throw std::invalid_argument("DIV range must be >= 0");
  if (trials < 1) throw std::invalid_argument("DIV trials must be >= 1");
  const int nu = freqs.phase_dim();
  const int d = freqs.lattice_dim();
  CounterRng rng(rng_seed);

  DivCertificate cert;
  cert.range = range;
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> a(static_cast<std::size_t>(nu)), b(static_cast<std::size_t>(nu));
    double dist0 = 0.0;
    do {
      for (int i = 0; i < nu; ++i) {
        a[static_cast<std::size_t>(i)] = rng.next_u01();
        b[static_cast<std::size_t>(i)] = rng.next_u01();
      }
      dist0 = torus_distance(TorusPoint(a), TorusPoint(b));
    } while (dist0 == 0.0);  // degenerate pair: resample
    LatticeVector x(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j)
      x[static_cast<std::size_t>(j)] =
          static_cast<int>(rng.next_index(static_cast<std::uint64_t>(2 * range + 1))) -
          static_cast<int>(range);
    const TorusPoint ta = translate(TorusPoint(a), x, freqs);
    const TorusPoint tb = translate(TorusPoint(b), x, freqs);
    worst = std::max(worst, torus_distance(ta, tb) / dist0);
  }
  cert.max_ratio = worst;
  cert.isometry = std::fabs(worst - 1.0) <= 1e-12 || worst <= 1.0;
  cert.exponent_a = 0.0;
  cert.constant_c = std::max(1.0, worst);
  return cert;
}

double metallic_mean(int m) {
  return (std::sqrt(static_cast<double>(m) * m + 4.0) - m) / 2.0;
}

FrequencyKind frequency_kind_from_string(const std::string& s) {
  if (s == "golden") return FrequencyKind::golden;
  if (s == "silver") return FrequencyKind::silver;
  if (s == "custom_cf" || s == "custom") return FrequencyKind::custom_cf;
  throw std::invalid_argument("unsupported frequency kind: " + s);
}

FrequencyMatrix diophantine_frequency(FrequencyKind kind, int nu, int d,
                                      const std::vector<int>& cf_coeffs) {
  if (nu < 1 || d < 1) throw std::invalid_argument("need nu >= 1 and d >= 1");
  FrequencyMatrix freqs;
  switch (kind) {
    case FrequencyKind::golden:
    case FrequencyKind::silver: {
      const int first = kind == FrequencyKind::golden ? 1 : 2;
      for (int j = 0; j < d; ++j) {
        std::vector<double> coords(static_cast<std::size_t>(nu));
        for (int i = 0; i < nu; ++i)
          coords[static_cast<std::size_t>(i)] = metallic_mean(first + j * nu + i);
        freqs.alphas.emplace_back(std::move(coords));
      }
      return freqs;
    }
    case FrequencyKind::custom_cf: {
      if (nu != 1 || d != 1)
        throw std::invalid_argument("custom_cf supports nu = d = 1 only");
      if (cf_coeffs.empty())
        throw std::invalid_argument("custom_cf needs continued-fraction coefficients");
      double v = 0.0;
      for (auto it = cf_coeffs.rbegin(); it != cf_coeffs.rend(); ++it) {
        if (*it < 1) throw std::invalid_argument("cf coefficients must be >= 1");
        v = 1.0 / (*it + v);
      }
      freqs.alphas.emplace_back(std::vector<double>{v});
      return freqs;
    }
  }
  throw std::invalid_argument("unsupported frequency kind");
}

}  // namespace msalab::dynamics
