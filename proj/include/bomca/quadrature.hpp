#pragma once

#include <span>

namespace bomca {

/// Composite Simpson rule for samples on a uniform grid with spacing h.
/// An odd number of intervals closes with Simpson's 3/8 rule on the last
/// three; two samples fall back to the trapezoid.
double simpson(std::span<const double> f, double h);

}  // namespace bomca
