#include "bomca/spline.hpp"

#include <algorithm>
#include <string>

#include "bomca/error.hpp"

namespace bomca {

ComplexSpline::ComplexSpline(std::vector<double> x, std::vector<Complex> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n < 2 || y_.size() != n)
    throw Error(ErrorKind::InvalidArgument, "spline needs at least two matching samples");
  for (std::size_t i = 1; i < n; ++i)
    if (!(x_[i] > x_[i - 1]))
      throw Error(ErrorKind::InvalidArgument, "spline abscissae must be strictly increasing");

  m_.assign(n, Complex{});
  if (n == 2) return;

  std::vector<double> h(n - 1);
  std::vector<Complex> slope(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x_[i + 1] - x_[i];
    slope[i] = (y_[i + 1] - y_[i]) / h[i];
  }
  if (n == 3) {
    const Complex curvature = 2.0 * (slope[1] - slope[0]) / (h[0] + h[1]);
    m_.assign(3, curvature);
    return;
  }

  // Unknowns M_1..M_{n-2}; M_0 and M_{n-1} are eliminated through the
  // not-a-knot conditions (third derivative continuous at x_1 and x_{n-2}).
  const std::size_t k = n - 2;
  std::vector<double> sub(k), diag(k), sup(k);
  std::vector<Complex> rhs(k);
  for (std::size_t r = 0; r < k; ++r) {
    const std::size_t i = r + 1;
    sub[r] = h[i - 1];
    diag[r] = 2.0 * (h[i - 1] + h[i]);
    sup[r] = h[i];
    rhs[r] = 6.0 * (slope[i] - slope[i - 1]);
  }
  {
    const double h0 = h[0], h1 = h[1];
    diag[0] += h0 * (h0 + h1) / h1;
    sup[0] -= h0 * h0 / h1;
  }
  {
    const double a = h[n - 3], b = h[n - 2];
    diag[k - 1] += b * (a + b) / a;
    sub[k - 1] -= b * b / a;
  }

  // Thomas algorithm.
  for (std::size_t r = 1; r < k; ++r) {
    const double w = sub[r] / diag[r - 1];
    diag[r] -= w * sup[r - 1];
    rhs[r] -= w * rhs[r - 1];
  }
  m_[k] = rhs[k - 1] / diag[k - 1];
  for (std::size_t r = k - 1; r-- > 0;) m_[r + 1] = (rhs[r] - sup[r] * m_[r + 2]) / diag[r];

  m_[0] = ((h[0] + h[1]) * m_[1] - h[0] * m_[2]) / h[1];
  {
    const double a = h[n - 3], b = h[n - 2];
    m_[n - 1] = ((a + b) * m_[n - 2] - b * m_[n - 3]) / a;
  }
}

std::size_t ComplexSpline::interval(double x) const {
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  const auto idx = static_cast<std::size_t>(std::distance(x_.begin(), it));
  return std::clamp<std::size_t>(idx == 0 ? 0 : idx - 1, 0, x_.size() - 2);
}

Complex ComplexSpline::operator()(double x) const {
  const std::size_t i = interval(x);
  const double h = x_[i + 1] - x_[i];
  const double a = x_[i + 1] - x;
  const double b = x - x_[i];
  return (m_[i] * (a * a * a) + m_[i + 1] * (b * b * b)) / (6.0 * h) +
         (y_[i] / h - m_[i] * h / 6.0) * a + (y_[i + 1] / h - m_[i + 1] * h / 6.0) * b;
}

Complex ComplexSpline::derivative(double x) const {
  const std::size_t i = interval(x);
  const double h = x_[i + 1] - x_[i];
  const double a = x_[i + 1] - x;
  const double b = x - x_[i];
  return (-m_[i] * (a * a) + m_[i + 1] * (b * b)) / (2.0 * h) - (y_[i] / h - m_[i] * h / 6.0) +
         (y_[i + 1] / h - m_[i + 1] * h / 6.0);
}

}  // namespace bomca
