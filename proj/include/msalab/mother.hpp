#pragma once

#include <vector>

namespace msalab::randelette {

/// Dense polynomial, coefficients ascending in degree.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) {}
  static Polynomial constant(double v) { return Polynomial({v}); }

  double eval(double t) const;
  Polynomial derivative() const;
  Polynomial antiderivative() const;  // constant term 0
  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  /// p(a t + b)
  Polynomial compose_affine(double a, double b) const;

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const std::vector<double>& coeffs() const { return c_; }

 private:
  std::vector<double> c_;
};

/// Piecewise polynomial on [breaks.front(), breaks.back()); zero outside.
/// Each piece is stored in the local coordinate s = t - breaks[i], which keeps
/// coefficients O(1) and evaluation cancellation-free.
struct PiecewisePoly {
  std::vector<double> breaks;      // ascending, size = pieces.size() + 1
  std::vector<Polynomial> pieces;  // pieces[i](t - breaks[i]) on [breaks[i], breaks[i+1])

  double eval(double t) const;
  PiecewisePoly derivative() const;
  /// max |value| over a scan grid including all breakpoints.
  double sup_abs(int samples_per_piece = 256) const;
};

/// Cardinal B-spline of order p (convolution of p unit boxes) as polynomial
/// pieces on [j, j+1), j = 0..p-1.
PiecewisePoly cardinal_bspline(int order);

/// Smooth bump that is exactly 1 on a plateau and 0 outside [0, 12].
///
/// smoothness = 1 reproduces the classical C^1 profile with quadratic ramps of
/// length 2 and plateau [2, 10].  smoothness = M >= 2 uses the integral of the
/// order-(M+1) cardinal B-spline as a C^M ramp of length 3, so the plateau is
/// the middle half [3, 9] of the support.
struct MotherFunction {
  int smoothness = 1;
  PiecewisePoly poly;   // the full profile on [0, 12]
  PiecewisePoly dpoly;  // its derivative
  double support_len = 12.0;
  double plateau_lo = 2.0;
  double plateau_hi = 10.0;
  double deriv_sup = 1.0;  // sup |Phi'|

  double eval(double t) const { return poly.eval(t); }
  double deriv(double t) const { return dpoly.eval(t); }
};

/// The explicit C^1 ramp: t^2/2 on [0,1), 1-(t-2)^2/2 on [1,2), 1 on [2,inf),
/// 0 for t < 0.  ||phi||_C1 = 1.
double phi_c1_eval(double t);

MotherFunction make_mother(int smoothness);

}  // namespace msalab::randelette
