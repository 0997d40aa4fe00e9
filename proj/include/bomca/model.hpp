#pragma once

#include <cstddef>
#include <string_view>
#include <variant>
#include <vector>

#include "bomca/complex.hpp"

namespace bomca {

/// V(x) = height / cosh^2(steepness * x).
struct EckartBarrier {
  double height;
  double steepness;
};

/// V(x) = stiffness * x^2 / 2.
struct HarmonicWell {
  double stiffness;
};

struct FreeSpace {};

/// Analytic 1D potential, evaluable with all derivatives at complex argument.
class PotentialModel {
 public:
  using Variant = std::variant<FreeSpace, EckartBarrier, HarmonicWell>;

  PotentialModel() = default;
  explicit PotentialModel(Variant v);

  static PotentialModel free() { return PotentialModel(FreeSpace{}); }
  static PotentialModel eckart(double height, double steepness) {
    return PotentialModel(EckartBarrier{height, steepness});
  }
  static PotentialModel harmonic(double stiffness) {
    return PotentialModel(HarmonicWell{stiffness});
  }

  const Variant& variant() const { return v_; }
  std::string_view name() const;

  template <class T>
  const T* as() const {
    return std::get_if<T>(&v_);
  }

  double operator()(double x) const;
  Complex operator()(Complex x) const;

  /// The same shape with its strength multiplied by `factor`.
  PotentialModel scaled(double factor) const;

 private:
  Variant v_{FreeSpace{}};
};

/// Mass, Planck constant and potential, all in atomic units.
class SystemSpec {
 public:
  SystemSpec(double mass, PotentialModel potential, double hbar = 1.0);

  double mass() const { return mass_; }
  double hbar() const { return hbar_; }
  const PotentialModel& potential() const { return potential_; }

 private:
  double mass_;
  double hbar_;
  PotentialModel potential_;
};

/// psi(x, 0) = (2 alpha / pi)^(1/4) exp[-alpha (x - x_c)^2 + (i/hbar) p_c (x - x_c)]
class GaussianWavepacket {
 public:
  GaussianWavepacket(double alpha, double x_c, double p_c);

  /// Rightward incidence: p_c = +sqrt(2 m E).
  static GaussianWavepacket from_energy(double alpha, double x_c, double energy, double mass);

  double alpha() const { return alpha_; }
  double center() const { return x_c_; }
  double momentum() const { return p_c_; }
  double norm_prefactor() const { return norm_; }
  double energy(double mass) const { return p_c_ * p_c_ / (2.0 * mass); }

  /// ln psi(x, 0) in exponent form, free of any branch choice.
  Complex log_value(Complex x, double hbar) const;
  Complex value(Complex x, double hbar) const;

 private:
  double alpha_;
  double x_c_;
  double p_c_;
  double norm_;
};

/// f(x), f'(x), ..., f^(K)(x) at a single base point.
struct DerivativeJet {
  Complex base_point;
  std::vector<Complex> values;

  std::size_t order() const { return values.size() - 1; }
  Complex operator[](std::size_t k) const { return values[k]; }
};

/// |cosh(beta x)| below this raises PoleProximity.
inline constexpr double kPoleThreshold = 1e-8;

DerivativeJet potential_jet(const PotentialModel& potential, Complex x, std::size_t order);

/// Writes V, V', ..., V^(out.size()-1) at x into `out` without building a
/// DerivativeJet. Hot path of the trajectory integrator.
void potential_derivatives(const PotentialModel& potential, Complex x, std::vector<Complex>& out);

/// v^(n)(0; x0) = (1/m) d^n S_x / dx^n at x0 for n = 0..n_max.
DerivativeJet initial_velocity_jet(const GaussianWavepacket& wp, const SystemSpec& sys, Complex x0,
                                   std::size_t n_max);

/// S(x0, 0) = -i hbar ln psi(x0, 0), evaluated from the exponent.
Complex initial_action(const GaussianWavepacket& wp, const SystemSpec& sys, Complex x0);

}  // namespace bomca
