#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bomca/complex.hpp"

namespace bomca {

/// Truncated Taylor series f(x0 + h) = sum_k c_k h^k, k = 0..order, over
/// complex scalars. Arithmetic propagates all coefficients exactly up to the
/// truncation order, so the k-th derivative of any composition is k! * c_k.
class Jet {
 public:
  explicit Jet(std::size_t order);
  Jet(std::size_t order, Complex constant);

  /// Identity series about `x0`: x0 + h.
  static Jet variable(Complex x0, std::size_t order);

  std::size_t order() const { return coeffs_.size() - 1; }
  std::span<const Complex> coefficients() const { return coeffs_; }
  Complex operator[](std::size_t k) const { return coeffs_[k]; }
  Complex& operator[](std::size_t k) { return coeffs_[k]; }

  /// k-th derivative at the expansion point.
  Complex derivative(std::size_t k) const;
  /// All derivatives f, f', ..., f^(order).
  std::vector<Complex> derivatives() const;

  Jet& operator+=(const Jet& rhs);
  Jet& operator-=(const Jet& rhs);
  Jet& operator*=(Complex s);
  Jet& operator+=(Complex s);

  friend Jet operator+(Jet lhs, const Jet& rhs) { return lhs += rhs; }
  friend Jet operator-(Jet lhs, const Jet& rhs) { return lhs -= rhs; }
  friend Jet operator*(Jet lhs, Complex s) { return lhs *= s; }
  friend Jet operator*(Complex s, Jet rhs) { return rhs *= s; }
  friend Jet operator+(Jet lhs, Complex s) { return lhs += s; }
  friend Jet operator-(const Jet& a) { return a * Complex(-1.0); }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator/(const Jet& a, const Jet& b);

 private:
  std::vector<Complex> coeffs_;
};

Jet exp(const Jet& a);

struct HyperbolicPair {
  Jet sinh;
  Jet cosh;
};

/// sinh and cosh of a series, seeded with the closed-form values at the
/// expansion point and extended by the coupled recurrence s' = c a', c' = s a'.
HyperbolicPair sinh_cosh(const Jet& a);

}  // namespace bomca
