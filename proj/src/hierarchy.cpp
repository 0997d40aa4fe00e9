#include "bomca/hierarchy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>
#include <string>

#include "bomca/error.hpp"

namespace bomca {

namespace {

constexpr int kMaxBinomialRow = TruncationOrder::kMax + 2;

constexpr auto make_pascal() {
  std::array<std::array<double, kMaxBinomialRow + 1>, kMaxBinomialRow + 1> c{};
  for (int n = 0; n <= kMaxBinomialRow; ++n) {
    c[n][0] = 1.0;
    for (int k = 1; k <= n; ++k) c[n][k] = c[n - 1][k - 1] + (k <= n - 1 ? c[n - 1][k] : 0.0);
  }
  return c;
}

constexpr auto kBinomial = make_pascal();

// Packed layout: [x, v0, ..., vN, S].
class PackedRhs {
 public:
  PackedRhs(const SystemSpec& sys, TruncationOrder order)
      : sys_(sys), n_(order.value()), vpot_(order.stack_size() + 1) {}

  void operator()(double, std::span<const Complex> y, std::span<Complex> dydt) {
    const auto stack = y.subspan(1, n_ + 1);
    potential_derivatives(sys_.potential(), y[0], vpot_);
    const double m = sys_.mass();
    const Complex quantum = kI * sys_.hbar() / (2.0 * m);
    dydt[0] = stack[0];
    for (int n = 0; n <= n_; ++n) {
      const Complex ahead = n + 2 <= n_ ? stack[n + 2] : Complex{};
      dydt[1 + n] = -vpot_[n + 1] / m + quantum * ahead - g_tilde(stack, n);
    }
    dydt[n_ + 2] =
        0.5 * m * stack[0] * stack[0] - vpot_[0] + 0.5 * kI * sys_.hbar() * stack[1];
  }

 private:
  const SystemSpec& sys_;
  int n_;
  std::vector<Complex> vpot_;
};

std::vector<Complex> pack(const TrajectoryState& s) {
  std::vector<Complex> y;
  y.reserve(s.v.size() + 2);
  y.push_back(s.x);
  y.insert(y.end(), s.v.begin(), s.v.end());
  y.push_back(s.S);
  return y;
}

TrajectoryState unpack(double t, std::span<const Complex> y) {
  return TrajectoryState{t, y.front(), {y.begin() + 1, y.end() - 1}, y.back()};
}

}  // namespace

std::vector<double> blowup_limits(double threshold, const SystemSpec& sys, TruncationOrder order) {
  const double scale = threshold * sys.mass() / sys.hbar();
  std::vector<double> limits(order.stack_size());
  double factor = threshold;
  for (std::size_t n = 0; n < limits.size(); ++n) {
    limits[n] = factor;
    factor *= static_cast<double>(n + 1) * scale;
  }
  return limits;
}

TruncationOrder::TruncationOrder(int n) : n_(n) {
  if (n < kMin || n > kMax)
    throw Error(ErrorKind::InvalidArgument,
                "truncation order must lie in [" + std::to_string(kMin) + ", " +
                    std::to_string(kMax) + "], got " + std::to_string(n));
}

void IntegratorConfig::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || !(initial_step > 0.0) || !(blowup_threshold > 0.0))
    throw Error(ErrorKind::InvalidArgument, "integrator tolerances and thresholds must be positive");
  if (max_steps <= 0) throw Error(ErrorKind::InvalidArgument, "max_steps must be positive");
}

ode::StepControl IntegratorConfig::step_control(double t_f) const {
  const double cap = max_step > 0.0 ? max_step : (t_f > 0.0 ? t_f / 100.0 : initial_step);
  return ode::StepControl{rel_tol, abs_tol, std::min(initial_step, cap), cap, max_steps};
}

Complex g_tilde(std::span<const Complex> stack, int n) {
  auto at = [&](int k) { return k < static_cast<int>(stack.size()) ? stack[k] : Complex{}; };
  Complex sum{};
  for (int j = 1; j <= n; ++j) sum += kBinomial[n][j] * at(j) * at(n - j + 1);
  return sum;
}

StateDerivative hierarchy_rhs(const TrajectoryState& state, const SystemSpec& sys,
                              TruncationOrder order) {
  if (state.v.size() != order.stack_size())
    throw Error(ErrorKind::InvalidArgument, "velocity stack size does not match truncation order");
  const auto y = pack(state);
  std::vector<Complex> dydt(y.size());
  PackedRhs rhs(sys, order);
  rhs(state.t, y, dydt);
  return StateDerivative{dydt.front(), {dydt.begin() + 1, dydt.end() - 1}, dydt.back()};
}

TrajectoryState initial_state(Complex x0, const GaussianWavepacket& wp, const SystemSpec& sys,
                              TruncationOrder order) {
  const auto jet = initial_velocity_jet(wp, sys, x0, static_cast<std::size_t>(order.value()));
  return TrajectoryState{0.0, x0, jet.values, initial_action(wp, sys, x0)};
}

Propagation propagate_state(const TrajectoryState& start, const SystemSpec& sys,
                            TruncationOrder order, double t_f, const IntegratorConfig& cfg,
                            std::span<const double> output_times) {
  cfg.validate();
  if (start.v.size() != order.stack_size())
    throw Error(ErrorKind::InvalidArgument, "velocity stack size does not match truncation order");
  if (!(t_f >= start.t)) throw Error(ErrorKind::InvalidArgument, "final time precedes start time");

  PackedRhs packed(sys, order);
  ode::ComplexRhs rhs = [&packed](double t, std::span<const Complex> y, std::span<Complex> d) {
    packed(t, y, d);
  };
  // A pole of v at distance d gives |v^(n)| ~ (hbar/m) n! / d^(n+1). The
  // threshold fixes d through n = 0 and every order is held to that d.
  const std::vector<double> limits = blowup_limits(cfg.blowup_threshold, sys, order);
  ode::StepCheck check = [&limits](double t, std::span<const Complex> y) {
    for (std::size_t k = 0; k < y.size(); ++k) {
      const bool velocity = k >= 1 && k + 1 < y.size();
      if (!std::isfinite(y[k].real()) || !std::isfinite(y[k].imag()) ||
          (velocity && std::abs(y[k]) > limits[k - 1]))
        throw Error(ErrorKind::Blowup, "velocity derivative v^(" + std::to_string(k - 1) +
                                           ") diverged at t = " + std::to_string(t));
    }
  };

  const auto sol = ode::integrate(rhs, pack(start), start.t, t_f,
                                  cfg.step_control(t_f - start.t), output_times, check);
  Propagation out;
  out.final_state = unpack(t_f, sol.final_state);
  out.steps = sol.accepted_steps;
  out.path.reserve(sol.samples.size());
  for (const auto& s : sol.samples) out.path.push_back(unpack(s.t, s.y));
  return out;
}

Propagation propagate_trajectory(Complex x0, const GaussianWavepacket& wp, const SystemSpec& sys,
                                 TruncationOrder order, double t_f, const IntegratorConfig& cfg,
                                 std::span<const double> output_times) {
  if (!(t_f >= 0.0)) throw Error(ErrorKind::InvalidArgument, "t_f must be non-negative");
  return propagate_state(initial_state(x0, wp, sys, order), sys, order, t_f, cfg, output_times);
}

void write_path_csv(std::ostream& os, std::span<const TrajectoryState> path) {
  const std::size_t stack = path.empty() ? 0 : path.front().v.size();
  os << "t,re_x,im_x";
  for (std::size_t n = 0; n < stack; ++n) os << ",re_v" << n << ",im_v" << n;
  os << ",re_S,im_S\n";
  const auto old = os.precision(17);
  for (const auto& s : path) {
    os << s.t << ',' << s.x.real() << ',' << s.x.imag();
    for (const auto& v : s.v) os << ',' << v.real() << ',' << v.imag();
    os << ',' << s.S.real() << ',' << s.S.imag() << '\n';
  }
  os.precision(old);
}

}  // namespace bomca
