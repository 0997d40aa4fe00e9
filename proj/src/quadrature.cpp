#include "bomca/quadrature.hpp"

namespace bomca {

double simpson(std::span<const double> f, double h) {
  const std::size_t n = f.size();
  if (n < 2) return 0.0;
  if (n == 2) return 0.5 * h * (f[0] + f[1]);

  const std::size_t intervals = n - 1;
  // Simpson 1/3 over an even number of leading intervals.
  const std::size_t even = intervals % 2 == 0 ? intervals : intervals - 3;
  double sum = 0.0;
  if (even > 0) {
    double acc = f[0] + f[even];
    for (std::size_t i = 1; i < even; ++i) acc += (i % 2 == 1 ? 4.0 : 2.0) * f[i];
    sum = acc * h / 3.0;
  }
  if (even != intervals) {
    const std::size_t j = even;
    sum += 3.0 * h / 8.0 * (f[j] + 3.0 * f[j + 1] + 3.0 * f[j + 2] + f[j + 3]);
  }
  return sum;
}

}  // namespace bomca
