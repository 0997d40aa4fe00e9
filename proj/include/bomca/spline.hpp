#pragma once

#include <span>
#include <vector>

#include "bomca/complex.hpp"

namespace bomca {

/// Cubic spline through complex samples on a strictly increasing real
/// abscissa, with not-a-knot end conditions (exact for cubic polynomials).
/// Falls back to the parabola through all points for three nodes and to
/// linear interpolation for two.
class ComplexSpline {
 public:
  ComplexSpline(std::vector<double> x, std::vector<Complex> y);

  Complex operator()(double x) const;
  /// First derivative of the interpolant.
  Complex derivative(double x) const;

  double front() const { return x_.front(); }
  double back() const { return x_.back(); }

 private:
  std::size_t interval(double x) const;

  std::vector<double> x_;
  std::vector<Complex> y_;
  std::vector<Complex> m_;  // second derivatives at the nodes
};

}  // namespace bomca
