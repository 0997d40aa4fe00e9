#include "bomca/reference.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <mutex>
#include <ostream>
#include <string>

#include "bomca/error.hpp"
#include "bomca/manifold.hpp"

namespace bomca {

namespace {

// The FFTW planner is not thread-safe; plan execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

constexpr std::size_t kBoundaryCheckInterval = 256;
constexpr double kBoundaryLayer = 0.05;
constexpr double kSpectralTail = 1e-14;
constexpr double kDensityFloor = 1e-10;

double edge_probability(const GridSpec& grid, const std::vector<Complex>& psi) {
  const std::size_t n = psi.size();
  const auto layer = std::max<std::size_t>(1, static_cast<std::size_t>(kBoundaryLayer * n));
  double left = 0.0, right = 0.0;
  for (std::size_t i = 0; i < layer; ++i) {
    left += std::norm(psi[i]);
    right += std::norm(psi[n - 1 - i]);
  }
  return std::max(left, right) * grid.spacing();
}

void check_boundary(const GridSpec& grid, const std::vector<Complex>& psi,
                    const SplitOperatorOptions& options, double t) {
  if (!options.check_boundary || options.absorber) return;
  const double p = edge_probability(grid, psi);
  if (p > options.boundary_threshold)
    throw Error(ErrorKind::GridTooSmall, "probability " + std::to_string(p) +
                                             " reached the grid edge at t = " + std::to_string(t));
}

void check_nyquist(const GridWavefunction& psi, const SystemSpec& sys) {
  const double k_max = kPi / psi.grid.spacing();
  const double p = momentum_estimate(psi, sys);
  if (!(p / sys.hbar() < k_max))
    throw Error(ErrorKind::NyquistViolation, "momentum estimate " + std::to_string(p) +
                                                 " exceeds the grid limit " +
                                                 std::to_string(k_max * sys.hbar()));
}

// Advances in chunks, checking the boundary between chunks and at the end.
void advance_checked(SplitOperatorPropagator& prop, std::vector<Complex>& psi, long n_steps,
                     const SplitOperatorOptions& options, double t0) {
  long done = 0;
  while (done < n_steps) {
    const long chunk = std::min<long>(kBoundaryCheckInterval, n_steps - done);
    prop.advance(psi, chunk);
    done += chunk;
    check_boundary(prop.grid(), psi, options, t0 + static_cast<double>(done) * prop.dt());
  }
}

std::vector<double> wavenumbers(const GridSpec& grid) {
  const std::size_t n = grid.n_points;
  const double dk = 2.0 * kPi / (grid.x_max - grid.x_min);
  std::vector<double> k(n);
  for (std::size_t i = 0; i < n; ++i)
    k[i] = dk * (i < n / 2 ? static_cast<double>(i) : static_cast<double>(i) - static_cast<double>(n));
  return k;
}

long steps_for(double duration, double dt) {
  return std::max<long>(1, static_cast<long>(std::ceil(duration / dt - 1e-9)));
}

}  // namespace

void GridSpec::validate() const {
  if (!(x_max > x_min) || !std::isfinite(x_min) || !std::isfinite(x_max))
    throw Error(ErrorKind::InvalidArgument, "grid needs finite x_min < x_max");
  if (n_points < 4 || !std::has_single_bit(n_points))
    throw Error(ErrorKind::InvalidArgument,
                "grid size must be a power of two, got " + std::to_string(n_points));
}

std::vector<double> GridSpec::points() const {
  std::vector<double> x(n_points);
  for (std::size_t i = 0; i < n_points; ++i) x[i] = point(i);
  return x;
}

double GridWavefunction::norm() const {
  double s = 0.0;
  for (const auto& z : psi) s += std::norm(z);
  return s * grid.spacing();
}

GridWavefunction sample_wavepacket(const GaussianWavepacket& wp, const GridSpec& grid,
                                   double hbar) {
  grid.validate();
  GridWavefunction out{grid, std::vector<Complex>(grid.n_points), 0.0};
  for (std::size_t i = 0; i < grid.n_points; ++i) out.psi[i] = wp.value(grid.point(i), hbar);
  return out;
}

struct SplitOperatorPropagator::Plans {
  std::vector<Complex> buffer;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  explicit Plans(std::size_t n) : buffer(n) {
    std::lock_guard lock(planner_mutex());
    forward = fftw_plan_dft_1d(static_cast<int>(n), as_fftw(buffer.data()),
                               as_fftw(buffer.data()), FFTW_FORWARD, FFTW_ESTIMATE);
    backward = fftw_plan_dft_1d(static_cast<int>(n), as_fftw(buffer.data()),
                                as_fftw(buffer.data()), FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~Plans() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
  }
  Plans(const Plans&) = delete;
  Plans& operator=(const Plans&) = delete;
};

SplitOperatorPropagator::SplitOperatorPropagator(const GridSpec& grid, const SystemSpec& sys,
                                                 double dt, std::optional<AbsorberSpec> absorber)
    : grid_(grid), dt_(dt), hbar_(sys.hbar()), mass_(sys.mass()) {
  grid_.validate();
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw Error(ErrorKind::InvalidArgument, "time step must be positive");
  const std::size_t n = grid_.n_points;
  half_potential_.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    half_potential_[i] = std::exp(-kI * sys.potential()(grid_.point(i)) * dt / (2.0 * hbar_));
  wavenumber_ = wavenumbers(grid_);
  kinetic_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double k = wavenumber_[i];
    kinetic_[i] = std::exp(-kI * hbar_ * k * k * dt / (2.0 * mass_)) / static_cast<double>(n);
  }
  if (absorber) {
    if (!(absorber->fraction > 0.0 && absorber->fraction < 0.5) || !(absorber->exponent > 0.0))
      throw Error(ErrorKind::InvalidArgument, "absorber fraction must be in (0, 0.5)");
    const double width = absorber->fraction * (grid_.x_max - grid_.x_min);
    mask_.assign(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double x = grid_.point(i);
      const double depth = std::max(grid_.x_min + width - x, x - (grid_.x_max - width));
      if (depth > 0.0)
        mask_[i] = std::pow(std::cos(0.5 * kPi * std::min(1.0, depth / width)), absorber->exponent);
    }
  }
  plans_ = std::make_unique<Plans>(n);
}

SplitOperatorPropagator::~SplitOperatorPropagator() = default;

void SplitOperatorPropagator::advance(std::vector<Complex>& psi, long n_steps) {
  const std::size_t n = grid_.n_points;
  if (psi.size() != n) throw Error(ErrorKind::InvalidArgument, "wavefunction size mismatch");
  auto& buf = plans_->buffer;
  std::copy(psi.begin(), psi.end(), buf.begin());
  for (long s = 0; s < n_steps; ++s) {
    for (std::size_t i = 0; i < n; ++i) buf[i] *= half_potential_[i];
    fftw_execute(plans_->forward);
    for (std::size_t i = 0; i < n; ++i) buf[i] *= kinetic_[i];
    fftw_execute(plans_->backward);
    for (std::size_t i = 0; i < n; ++i) buf[i] *= half_potential_[i];
    if (!mask_.empty())
      for (std::size_t i = 0; i < n; ++i) buf[i] *= mask_[i];
  }
  std::copy(buf.begin(), buf.end(), psi.begin());
}

std::vector<Complex> SplitOperatorPropagator::derivative(const std::vector<Complex>& psi) {
  const std::size_t n = grid_.n_points;
  if (psi.size() != n) throw Error(ErrorKind::InvalidArgument, "wavefunction size mismatch");
  auto& buf = plans_->buffer;
  std::copy(psi.begin(), psi.end(), buf.begin());
  fftw_execute(plans_->forward);
  for (std::size_t i = 0; i < n; ++i) {
    // The Nyquist mode has no well-defined derivative sign; drop it.
    const double k = i == n / 2 ? 0.0 : wavenumber_[i];
    buf[i] *= kI * k / static_cast<double>(n);
  }
  fftw_execute(plans_->backward);
  return buf;
}

namespace {

// Unnormalised forward DFT with a one-off plan.
std::vector<Complex> forward_transform(std::vector<Complex> data) {
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(data.size()), as_fftw(data.data()),
                            as_fftw(data.data()), FFTW_FORWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(plan);
  return data;
}

}  // namespace

std::vector<Complex> fourier_interpolate(const GridWavefunction& psi, std::span<const double> x) {
  psi.grid.validate();
  if (psi.psi.size() != psi.grid.n_points)
    throw Error(ErrorKind::InvalidArgument, "wavefunction size does not match its grid");
  const auto k = wavenumbers(psi.grid);
  auto coeffs = forward_transform(psi.psi);
  const double scale = 1.0 / static_cast<double>(coeffs.size());
  for (auto& c : coeffs) c *= scale;
  std::vector<Complex> out;
  out.reserve(x.size());
  for (double xi : x) {
    Complex sum{};
    const double shift = xi - psi.grid.x_min;
    for (std::size_t j = 0; j < coeffs.size(); ++j)
      sum += coeffs[j] * std::exp(Complex(0.0, k[j] * shift));
    out.push_back(sum);
  }
  return out;
}

double momentum_estimate(const GridWavefunction& psi, const SystemSpec& sys) {
  const GridSpec& grid = psi.grid;
  grid.validate();
  const std::size_t n = grid.n_points;

  const std::vector<Complex> spectrum = forward_transform(psi.psi);
  const auto k = wavenumbers(grid);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return std::abs(k[a]) > std::abs(k[b]); });
  double total = 0.0;
  for (const auto& z : spectrum) total += std::norm(z);
  // Walk down from the highest |k| until the discarded tail is significant.
  double tail = 0.0;
  double k_content = 0.0;
  for (std::size_t i : order) {
    tail += std::norm(spectrum[i]);
    if (tail > kSpectralTail * total) {
      k_content = std::abs(k[i]);
      break;
    }
  }

  double peak = 0.0;
  for (const auto& z : psi.psi) peak = std::max(peak, std::norm(z));
  double v_occupied = -HUGE_VAL, v_min = HUGE_VAL;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = sys.potential()(grid.point(i));
    v_min = std::min(v_min, v);
    if (std::norm(psi.psi[i]) >= kDensityFloor * peak) v_occupied = std::max(v_occupied, v);
  }
  const double p_spectral = sys.hbar() * k_content;
  const double drop = std::max(0.0, v_occupied - v_min);
  return std::sqrt(p_spectral * p_spectral + 2.0 * sys.mass() * drop);
}

GridWavefunction split_operator_propagate(const GridWavefunction& psi0, const SystemSpec& sys,
                                          double dt, long n_steps,
                                          const SplitOperatorOptions& options) {
  psi0.grid.validate();
  if (psi0.psi.size() != psi0.grid.n_points)
    throw Error(ErrorKind::InvalidArgument, "wavefunction size does not match its grid");
  if (n_steps < 0) throw Error(ErrorKind::InvalidArgument, "step count must be non-negative");
  if (options.check_nyquist) check_nyquist(psi0, sys);
  SplitOperatorPropagator prop(psi0.grid, sys, dt, options.absorber);
  GridWavefunction out = psi0;
  advance_checked(prop, out.psi, n_steps, options, psi0.t);
  out.t = psi0.t + static_cast<double>(n_steps) * dt;
  return out;
}

Complex analytic_free_gaussian(const GaussianWavepacket& wp, const SystemSpec& sys, Complex x,
                               double t) {
  const double m = sys.mass(), hbar = sys.hbar();
  const double alpha = wp.alpha(), xc = wp.center(), pc = wp.momentum();
  const Complex spread = 1.0 + 2.0 * kI * hbar * alpha * t / m;
  const Complex d = x - xc - pc * t / m;
  const Complex exponent = -alpha * d * d / spread + kI * pc * (x - xc) / hbar -
                           kI * pc * pc * t / (2.0 * m * hbar);
  return wp.norm_prefactor() / std::sqrt(spread) * std::exp(exponent);
}

Complex analytic_harmonic_gaussian(const GaussianWavepacket& wp, const SystemSpec& sys,
                                   Complex x, double t) {
  const auto* well = sys.potential().as<HarmonicWell>();
  if (!well || !(well->stiffness > 0.0))
    throw Error(ErrorKind::InvalidArgument, "harmonic Gaussian needs a positive stiffness");
  const double m = sys.mass(), hbar = sys.hbar();
  const double omega = std::sqrt(well->stiffness / m);
  const double c = std::cos(omega * t), s = std::sin(omega * t);

  // S = a (x - q)^2 + p (x - q) + gamma, with a = (m/2) Y'/Y.
  const Complex a0 = kI * hbar * wp.alpha();
  const Complex y = c + 2.0 * a0 / (m * omega) * s;
  const Complex dy = -omega * s + 2.0 * a0 / m * c;
  const Complex a = 0.5 * m * dy / y;
  const double q0 = wp.center(), p0 = wp.momentum();
  const double q = q0 * c + p0 / (m * omega) * s;
  const double p = p0 * c - m * omega * q0 * s;

  // arg Y stays within pi/2 of omega t, which fixes the branch.
  double theta = std::arg(y);
  theta += 2.0 * kPi * std::round((omega * t - theta) / (2.0 * kPi));
  const Complex log_y(std::log(std::abs(y)), theta);

  const Complex gamma0 = -kI * hbar * std::log(wp.norm_prefactor());
  const Complex gamma = gamma0 + 0.5 * (p * q - p0 * q0) + 0.5 * kI * hbar * log_y;
  const Complex d = x - q;
  const Complex S = a * d * d + p * d + gamma;
  return std::exp(kI * S / hbar);
}

Complex analytic_gaussian(const GaussianWavepacket& wp, const SystemSpec& sys, Complex x,
                          double t) {
  if (sys.potential().as<FreeSpace>()) return analytic_free_gaussian(wp, sys, x, t);
  if (const auto* h = sys.potential().as<HarmonicWell>()) {
    if (h->stiffness == 0.0) return analytic_free_gaussian(wp, sys, x, t);
    return analytic_harmonic_gaussian(wp, sys, x, t);
  }
  throw Error(ErrorKind::InvalidArgument,
              "no closed form for the " + std::string(sys.potential().name()) + " potential");
}

double probability_flux(SplitOperatorPropagator& prop, const std::vector<Complex>& psi, double x) {
  const GridSpec& grid = prop.grid();
  const auto i = static_cast<std::size_t>(
      std::clamp<long>(std::lround((x - grid.x_min) / grid.spacing()), 0,
                       static_cast<long>(grid.n_points) - 1));
  const auto dpsi = prop.derivative(psi);
  return prop.hbar() / prop.mass() * std::imag(std::conj(psi[i]) * dpsi[i]);
}

namespace {

ExactTransmission measure(SplitOperatorPropagator& prop, const std::vector<Complex>& psi,
                          double t) {
  const GridSpec& grid = prop.grid();
  ExactTransmission out;
  out.t_f = t;
  out.transmission = transmission_probability(grid.points(), psi);
  out.flux = probability_flux(prop, psi, 0.0);
  double norm = 0.0;
  for (const auto& z : psi) norm += std::norm(z);
  out.norm = norm * grid.spacing();
  return out;
}

bool asymptotic(const ExactTransmission& r, const TransmissionOptions& options) {
  return std::abs(r.flux) <= options.flux_tolerance * r.transmission + options.flux_floor;
}

}  // namespace

ExactTransmission transmission_exact(const GaussianWavepacket& wp, const SystemSpec& sys,
                                     double t_f, const TransmissionOptions& options) {
  if (!(t_f > 0.0)) throw Error(ErrorKind::InvalidArgument, "t_f must be positive");
  GridWavefunction psi = sample_wavepacket(wp, options.grid, sys.hbar());
  if (options.propagation.check_nyquist) check_nyquist(psi, sys);
  const long n = steps_for(t_f, options.dt);
  SplitOperatorPropagator prop(options.grid, sys, t_f / static_cast<double>(n),
                               options.propagation.absorber);
  advance_checked(prop, psi.psi, n, options.propagation, 0.0);
  const ExactTransmission r = measure(prop, psi.psi, t_f);
  if (options.check_flux && !asymptotic(r, options))
    throw Error(ErrorKind::NotAsymptotic, "flux " + std::to_string(r.flux) + " through x = 0 at t = " +
                                              std::to_string(t_f) + " with T = " +
                                              std::to_string(r.transmission));
  return r;
}

ExactTransmission asymptotic_transmission(const GaussianWavepacket& wp, const SystemSpec& sys,
                                          double t_start, double t_step, double t_max,
                                          const TransmissionOptions& options) {
  if (!(t_start > 0.0) || !(t_step > 0.0) || !(t_max >= t_start))
    throw Error(ErrorKind::InvalidArgument, "need 0 < t_start <= t_max and t_step > 0");
  GridWavefunction psi = sample_wavepacket(wp, options.grid, sys.hbar());
  if (options.propagation.check_nyquist) check_nyquist(psi, sys);

  const long n0 = steps_for(t_start, options.dt);
  auto prop = std::make_unique<SplitOperatorPropagator>(
      options.grid, sys, t_start / static_cast<double>(n0), options.propagation.absorber);
  advance_checked(*prop, psi.psi, n0, options.propagation, 0.0);
  ExactTransmission r = measure(*prop, psi.psi, t_start);

  const long n_inc = steps_for(t_step, options.dt);
  prop = std::make_unique<SplitOperatorPropagator>(
      options.grid, sys, t_step / static_cast<double>(n_inc), options.propagation.absorber);
  for (int k = 1; !asymptotic(r, options); ++k) {
    const double t = t_start + k * t_step;
    if (t > t_max + 1e-12)
      throw Error(ErrorKind::NotAsymptotic, "flux through x = 0 still " + std::to_string(r.flux) +
                                                " at t = " + std::to_string(r.t_f));
    advance_checked(*prop, psi.psi, n_inc, options.propagation, r.t_f);
    r = measure(*prop, psi.psi, t);
  }
  return r;
}

void write_grid_csv(std::ostream& os, const std::vector<double>& x,
                    const std::vector<Complex>& psi) {
  if (x.size() != psi.size()) throw Error(ErrorKind::InvalidArgument, "grid/psi size mismatch");
  const auto precision = os.precision(17);
  os << "x,re_psi,im_psi,abs2\n";
  for (std::size_t i = 0; i < x.size(); ++i)
    os << x[i] << ',' << psi[i].real() << ',' << psi[i].imag() << ',' << std::norm(psi[i]) << '\n';
  os.precision(precision);
}

}  // namespace bomca
