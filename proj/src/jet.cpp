#include "bomca/jet.hpp"

#include <cassert>

namespace bomca {

Jet::Jet(std::size_t order) : coeffs_(order + 1, Complex{}) {}

Jet::Jet(std::size_t order, Complex constant) : Jet(order) { coeffs_[0] = constant; }

Jet Jet::variable(Complex x0, std::size_t order) {
  Jet j(order, x0);
  if (order >= 1) j.coeffs_[1] = 1.0;
  return j;
}

Complex Jet::derivative(std::size_t k) const {
  double factorial = 1.0;
  for (std::size_t i = 2; i <= k; ++i) factorial *= static_cast<double>(i);
  return coeffs_[k] * factorial;
}

std::vector<Complex> Jet::derivatives() const {
  std::vector<Complex> out(coeffs_.size());
  double factorial = 1.0;
  for (std::size_t k = 0; k < coeffs_.size(); ++k) {
    if (k >= 2) factorial *= static_cast<double>(k);
    out[k] = coeffs_[k] * factorial;
  }
  return out;
}

Jet& Jet::operator+=(const Jet& rhs) {
  assert(rhs.order() == order());
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += rhs.coeffs_[k];
  return *this;
}

Jet& Jet::operator-=(const Jet& rhs) {
  assert(rhs.order() == order());
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] -= rhs.coeffs_[k];
  return *this;
}

Jet& Jet::operator*=(Complex s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

Jet& Jet::operator+=(Complex s) {
  coeffs_[0] += s;
  return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
  assert(a.order() == b.order());
  const std::size_t n = a.coeffs_.size();
  Jet out(a.order());
  for (std::size_t k = 0; k < n; ++k) {
    Complex sum{};
    for (std::size_t j = 0; j <= k; ++j) sum += a.coeffs_[j] * b.coeffs_[k - j];
    out.coeffs_[k] = sum;
  }
  return out;
}

Jet operator/(const Jet& a, const Jet& b) {
  assert(a.order() == b.order());
  const std::size_t n = a.coeffs_.size();
  Jet q(a.order());
  const Complex b0 = b.coeffs_[0];
  for (std::size_t k = 0; k < n; ++k) {
    Complex sum = a.coeffs_[k];
    for (std::size_t j = 1; j <= k; ++j) sum -= b.coeffs_[j] * q.coeffs_[k - j];
    q.coeffs_[k] = sum / b0;
  }
  return q;
}

Jet exp(const Jet& a) {
  Jet out(a.order());
  out[0] = std::exp(a[0]);
  for (std::size_t k = 1; k <= a.order(); ++k) {
    Complex sum{};
    for (std::size_t j = 1; j <= k; ++j) sum += static_cast<double>(j) * a[j] * out[k - j];
    out[k] = sum / static_cast<double>(k);
  }
  return out;
}

HyperbolicPair sinh_cosh(const Jet& a) {
  HyperbolicPair p{Jet(a.order()), Jet(a.order())};
  p.sinh[0] = std::sinh(a[0]);
  p.cosh[0] = std::cosh(a[0]);
  for (std::size_t k = 1; k <= a.order(); ++k) {
    Complex s{}, c{};
    for (std::size_t j = 1; j <= k; ++j) {
      const Complex ja = static_cast<double>(j) * a[j];
      s += ja * p.cosh[k - j];
      c += ja * p.sinh[k - j];
    }
    p.sinh[k] = s / static_cast<double>(k);
    p.cosh[k] = c / static_cast<double>(k);
  }
  return p;
}

}  // namespace bomca
