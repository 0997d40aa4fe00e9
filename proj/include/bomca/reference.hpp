#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "bomca/complex.hpp"
#include "bomca/model.hpp"

namespace bomca {

/// Periodic grid x_i = x_min + i (x_max - x_min) / n_points, i < n_points.
struct GridSpec {
  double x_min = -10.0;
  double x_max = 10.0;
  std::size_t n_points = 4096;

  void validate() const;
  double spacing() const { return (x_max - x_min) / static_cast<double>(n_points); }
  double point(std::size_t i) const { return x_min + static_cast<double>(i) * spacing(); }
  std::vector<double> points() const;
};

struct GridWavefunction {
  GridSpec grid;
  std::vector<Complex> psi;
  double t = 0.0;

  double norm() const;  // sum |psi|^2 dx
};

GridWavefunction sample_wavepacket(const GaussianWavepacket& wp, const GridSpec& grid, double hbar);

/// Multiplies psi once per step by cos(pi/2 * s)^exponent, s the depth
/// (0..1) into a layer covering `fraction` of the grid at each end.
struct AbsorberSpec {
  double fraction = 0.1;
  double exponent = 0.125;
};

struct SplitOperatorOptions {
  std::optional<AbsorberSpec> absorber;
  bool check_nyquist = true;
  bool check_boundary = true;
  /// Probability allowed in the outer 5% at either end when no absorber is set.
  double boundary_threshold = 1e-10;
};

/// Strang-split TDSE stepper on a fixed grid. Holds FFTW plans, so one
/// instance belongs to one thread; separate instances may run concurrently.
class SplitOperatorPropagator {
 public:
  SplitOperatorPropagator(const GridSpec& grid, const SystemSpec& sys, double dt,
                          std::optional<AbsorberSpec> absorber = {});
  ~SplitOperatorPropagator();
  SplitOperatorPropagator(const SplitOperatorPropagator&) = delete;
  SplitOperatorPropagator& operator=(const SplitOperatorPropagator&) = delete;

  /// Advances psi in place by n_steps * dt.
  void advance(std::vector<Complex>& psi, long n_steps);

  /// d psi / dx by spectral differentiation.
  std::vector<Complex> derivative(const std::vector<Complex>& psi);

  const GridSpec& grid() const { return grid_; }
  double dt() const { return dt_; }
  double hbar() const { return hbar_; }
  double mass() const { return mass_; }

 private:
  struct Plans;

  GridSpec grid_;
  double dt_;
  double hbar_;
  double mass_;
  std::vector<Complex> half_potential_;  // exp(-i V dt / 2 hbar)
  std::vector<Complex> kinetic_;         // exp(-i hbar k^2 dt / 2m) / n
  std::vector<double> wavenumber_;
  std::vector<double> mask_;  // empty without absorber
  std::unique_ptr<Plans> plans_;
};

/// Band-limited (trigonometric) interpolation of a grid state at arbitrary x.
std::vector<Complex> fourier_interpolate(const GridWavefunction& psi, std::span<const double> x);

/// Largest momentum the state can reach: its spectral content plus the
/// energy it can pick up sliding down the potential.
double momentum_estimate(const GridWavefunction& psi, const SystemSpec& sys);

/// Errors: NyquistViolation, GridTooSmall, InvalidArgument.
GridWavefunction split_operator_propagate(const GridWavefunction& psi0, const SystemSpec& sys,
                                          double dt, long n_steps,
                                          const SplitOperatorOptions& options = {});

/// Freely spreading Gaussian at complex x, time t.
Complex analytic_free_gaussian(const GaussianWavepacket& wp, const SystemSpec& sys, Complex x,
                               double t);

/// Gaussian in V = k x^2 / 2, on the branch continuous in t from t = 0.
Complex analytic_harmonic_gaussian(const GaussianWavepacket& wp, const SystemSpec& sys,
                                   Complex x, double t);

/// Dispatches on the potential; InvalidArgument for anything but free or harmonic.
Complex analytic_gaussian(const GaussianWavepacket& wp, const SystemSpec& sys, Complex x, double t);

/// Probability current (hbar/m) Im(psi* psi_x) at the grid point nearest x.
double probability_flux(SplitOperatorPropagator& prop, const std::vector<Complex>& psi, double x);

struct TransmissionOptions {
  GridSpec grid;
  double dt = 1e-4;
  SplitOperatorOptions propagation;
  /// Accept t_f once |flux(0)| <= flux_tolerance * T + flux_floor.
  double flux_tolerance = 0.02;
  double flux_floor = 1e-12;
  bool check_flux = true;
};

struct ExactTransmission {
  double t_f = 0.0;
  double transmission = 0.0;
  double flux = 0.0;  // at x = 0, t_f
  double norm = 0.0;
};

/// T = integral over x > 0 of |psi(t_f)|^2, same quadrature as the
/// trajectory reconstruction.
///
/// Errors: NotAsymptotic (flux check), plus those of split_operator_propagate.
ExactTransmission transmission_exact(const GaussianWavepacket& wp, const SystemSpec& sys,
                                     double t_f, const TransmissionOptions& options = {});

/// Propagates from t_start in increments of t_step until the flux check
/// passes; NotAsymptotic if t_max is reached first.
ExactTransmission asymptotic_transmission(const GaussianWavepacket& wp, const SystemSpec& sys,
                                          double t_start, double t_step, double t_max,
                                          const TransmissionOptions& options = {});

/// CSV: x, re_psi, im_psi, abs2 (header included).
void write_grid_csv(std::ostream& os, const std::vector<double>& x,
                    const std::vector<Complex>& psi);

}  // namespace bomca
