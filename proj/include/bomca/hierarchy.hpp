#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "bomca/complex.hpp"
#include "bomca/model.hpp"
#include "bomca/ode.hpp"

namespace bomca {

/// Number of carried velocity derivatives N: the state holds v^(0)..v^(N)
/// and the hierarchy is closed with v^(N+1) = v^(N+2) = 0.
class TruncationOrder {
 public:
  static constexpr int kMin = 1;
  static constexpr int kMax = 8;

  explicit TruncationOrder(int n);
  int value() const { return n_; }
  std::size_t stack_size() const { return static_cast<std::size_t>(n_) + 1; }

  friend bool operator==(TruncationOrder, TruncationOrder) = default;

 private:
  int n_;
};

/// One complex quantum trajectory at time t.
struct TrajectoryState {
  double t = 0.0;
  Complex x;
  std::vector<Complex> v;  // v^(0)..v^(N)
  Complex S;
};

struct IntegratorConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-10;
  double initial_step = 1e-4;
  double max_step = 0.0;  // <= 0 selects t_f / 100
  long max_steps = 200000;
  double blowup_threshold = 1e6;  // on |v^(0)|; see blowup_limits

  void validate() const;
  ode::StepControl step_control(double t_f) const;
};

/// Per-order limits on |v^(n)|: threshold * n! * (m threshold / hbar)^n,
/// i.e. the size v^(n) reaches when v^(0) hits `threshold` next to a pole.
std::vector<double> blowup_limits(double threshold, const SystemSpec& sys, TruncationOrder order);

struct StateDerivative {
  Complex dx;
  std::vector<Complex> dv;
  Complex dS;
};

/// g~_n = sum_{j=1}^{n} C(n, j) v^(j) v^(n-j+1); entries past the end of
/// `stack` count as zero.
Complex g_tilde(std::span<const Complex> stack, int n);

/// Time derivative of (x, v^(0)..v^(N), S) along a trajectory.
StateDerivative hierarchy_rhs(const TrajectoryState& state, const SystemSpec& sys,
                              TruncationOrder order);

/// Launch state at t = 0 from the initial wavepacket.
TrajectoryState initial_state(Complex x0, const GaussianWavepacket& wp, const SystemSpec& sys,
                              TruncationOrder order);

struct Propagation {
  TrajectoryState final_state;
  std::vector<TrajectoryState> path;  // states at the requested output times
  long steps = 0;
};

/// Integrates a trajectory launched at x0 up to t_f. `output_times`, when
/// given, must be sorted within [0, t_f].
///
/// Errors: StepLimitExceeded, Blowup (|v^(n)| above the threshold or
/// non-finite state), PoleProximity.
Propagation propagate_trajectory(Complex x0, const GaussianWavepacket& wp, const SystemSpec& sys,
                                 TruncationOrder order, double t_f, const IntegratorConfig& cfg,
                                 std::span<const double> output_times = {});

Propagation propagate_state(const TrajectoryState& start, const SystemSpec& sys,
                            TruncationOrder order, double t_f, const IntegratorConfig& cfg,
                            std::span<const double> output_times = {});

/// CSV: t, Re x, Im x, Re v0, Im v0, ..., Re S, Im S (header included).
void write_path_csv(std::ostream& os, std::span<const TrajectoryState> path);

}  // namespace bomca
