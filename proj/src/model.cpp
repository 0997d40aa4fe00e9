#include "bomca/model.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "bomca/error.hpp"
#include "bomca/jet.hpp"

namespace bomca {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_finite_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value))
    throw Error(ErrorKind::InvalidArgument, std::string(what) + " must be positive and finite");
}

Jet potential_series(const PotentialModel& potential, Complex x, std::size_t order) {
  return std::visit(
      Overloaded{
          [&](const FreeSpace&) { return Jet(order); },
          [&](const HarmonicWell& h) {
            Jet var = Jet::variable(x, order);
            return (var * var) * Complex(0.5 * h.stiffness);
          },
          [&](const EckartBarrier& e) {
            Jet arg = Jet::variable(x, order) * Complex(e.steepness);
            const HyperbolicPair hp = sinh_cosh(arg);
            if (std::abs(hp.cosh[0]) < kPoleThreshold)
              throw Error(ErrorKind::PoleProximity,
                          "cosh(beta x) vanishes near x = (" + std::to_string(x.real()) + ", " +
                              std::to_string(x.imag()) + ")");
            return Jet(order, Complex(e.height)) / (hp.cosh * hp.cosh);
          },
      },
      potential.variant());
}

}  // namespace

PotentialModel::PotentialModel(Variant v) : v_(v) {
  std::visit(Overloaded{
                 [](const FreeSpace&) {},
                 [](const HarmonicWell& h) {
                   if (!std::isfinite(h.stiffness))
                     throw Error(ErrorKind::InvalidArgument, "harmonic stiffness must be finite");
                 },
                 [](const EckartBarrier& e) {
                   if (!std::isfinite(e.height))
                     throw Error(ErrorKind::InvalidArgument, "Eckart height must be finite");
                   require_finite_positive(e.steepness, "Eckart steepness");
                 },
             },
             v_);
}

std::string_view PotentialModel::name() const {
  return std::visit(Overloaded{
                        [](const FreeSpace&) { return std::string_view("free"); },
                        [](const HarmonicWell&) { return std::string_view("harmonic"); },
                        [](const EckartBarrier&) { return std::string_view("eckart"); },
                    },
                    v_);
}

double PotentialModel::operator()(double x) const {
  return std::visit(Overloaded{
                        [](const FreeSpace&) { return 0.0; },
                        [x](const HarmonicWell& h) { return 0.5 * h.stiffness * x * x; },
                        [x](const EckartBarrier& e) {
                          const double c = std::cosh(e.steepness * x);
                          return e.height / (c * c);
                        },
                    },
                    v_);
}

Complex PotentialModel::operator()(Complex x) const {
  return std::visit(Overloaded{
                        [](const FreeSpace&) { return Complex{}; },
                        [x](const HarmonicWell& h) { return 0.5 * h.stiffness * x * x; },
                        [x](const EckartBarrier& e) {
                          const Complex c = std::cosh(e.steepness * x);
                          return e.height / (c * c);
                        },
                    },
                    v_);
}

PotentialModel PotentialModel::scaled(double factor) const {
  return std::visit(Overloaded{
                        [](const FreeSpace&) { return PotentialModel::free(); },
                        [factor](const HarmonicWell& h) {
                          return PotentialModel::harmonic(h.stiffness * factor);
                        },
                        [factor](const EckartBarrier& e) {
                          return PotentialModel::eckart(e.height * factor, e.steepness);
                        },
                    },
                    v_);
}

SystemSpec::SystemSpec(double mass, PotentialModel potential, double hbar)
    : mass_(mass), hbar_(hbar), potential_(std::move(potential)) {
  require_finite_positive(mass_, "mass");
  require_finite_positive(hbar_, "hbar");
}

GaussianWavepacket::GaussianWavepacket(double alpha, double x_c, double p_c)
    : alpha_(alpha), x_c_(x_c), p_c_(p_c) {
  require_finite_positive(alpha_, "alpha");
  if (!std::isfinite(x_c_) || !std::isfinite(p_c_))
    throw Error(ErrorKind::InvalidArgument, "wavepacket center and momentum must be finite");
  norm_ = std::pow(2.0 * alpha_ / kPi, 0.25);
}

GaussianWavepacket GaussianWavepacket::from_energy(double alpha, double x_c, double energy,
                                                   double mass) {
  if (!(energy >= 0.0)) throw Error(ErrorKind::InvalidArgument, "energy must be non-negative");
  require_finite_positive(mass, "mass");
  return GaussianWavepacket(alpha, x_c, std::sqrt(2.0 * mass * energy));
}

Complex GaussianWavepacket::log_value(Complex x, double hbar) const {
  const Complex d = x - x_c_;
  return std::log(norm_) - alpha_ * d * d + kI * (p_c_ / hbar) * d;
}

Complex GaussianWavepacket::value(Complex x, double hbar) const {
  return std::exp(log_value(x, hbar));
}

DerivativeJet potential_jet(const PotentialModel& potential, Complex x, std::size_t order) {
  return DerivativeJet{x, potential_series(potential, x, order).derivatives()};
}

void potential_derivatives(const PotentialModel& potential, Complex x, std::vector<Complex>& out) {
  if (out.empty()) return;
  out = potential_series(potential, x, out.size() - 1).derivatives();
}

DerivativeJet initial_velocity_jet(const GaussianWavepacket& wp, const SystemSpec& sys, Complex x0,
                                   std::size_t n_max) {
  // -i hbar psi_x / psi = p_c + 2 i hbar alpha (x - x_c): linear in x.
  const double m = sys.mass();
  const double hbar = sys.hbar();
  DerivativeJet jet{x0, std::vector<Complex>(n_max + 1, Complex{})};
  jet.values[0] = (wp.momentum() + 2.0 * kI * hbar * wp.alpha() * (x0 - wp.center())) / m;
  if (n_max >= 1) jet.values[1] = 2.0 * kI * hbar * wp.alpha() / m;
  return jet;
}

Complex initial_action(const GaussianWavepacket& wp, const SystemSpec& sys, Complex x0) {
  return -kI * sys.hbar() * wp.log_value(x0, sys.hbar());
}

}  // namespace bomca
