#include "bomca/ode.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/numeric/odeint.hpp>

#include "bomca/error.hpp"

namespace bomca::ode {

namespace odeint = boost::numeric::odeint;

namespace {

using RealState = std::vector<double>;

// std::complex<double> is layout-compatible with double[2], so the packed
// real state can be viewed as complex in place.
std::span<const Complex> as_complex(const RealState& y) {
  return {reinterpret_cast<const Complex*>(y.data()), y.size() / 2};
}
std::span<Complex> as_complex(RealState& y) {
  return {reinterpret_cast<Complex*>(y.data()), y.size() / 2};
}

RealState pack(const std::vector<Complex>& z) {
  RealState y(2 * z.size());
  std::copy(z.begin(), z.end(), as_complex(y).begin());
  return y;
}

std::vector<Complex> unpack(const RealState& y) {
  auto view = as_complex(y);
  return {view.begin(), view.end()};
}

}  // namespace

Solution integrate(const ComplexRhs& rhs, std::vector<Complex> y0, double t0, double t1,
                   const StepControl& control, std::span<const double> output_times,
                   const StepCheck& check) {
  if (!(t1 >= t0)) throw Error(ErrorKind::InvalidArgument, "integration interval is reversed");
  for (double t : output_times)
    if (t < t0 || t > t1)
      throw Error(ErrorKind::InvalidArgument, "output time outside integration interval");
  if (!std::is_sorted(output_times.begin(), output_times.end()))
    throw Error(ErrorKind::InvalidArgument, "output times must be sorted");

  Solution sol;
  RealState y = pack(y0);
  std::size_t next_out = 0;
  auto emit_due = [&](double t) {
    while (next_out < output_times.size() && output_times[next_out] <= t) {
      sol.samples.push_back({output_times[next_out], unpack(y)});
      ++next_out;
    }
  };
  emit_due(t0);
  if (t1 == t0) {
    sol.final_state = std::move(y0);
    return sol;
  }

  auto system = [&rhs](const RealState& x, RealState& dxdt, double t) {
    rhs(t, as_complex(x), as_complex(dxdt));
  };
  auto stepper = odeint::make_controlled(control.abs_tol, control.rel_tol, control.max_step,
                                         odeint::runge_kutta_dopri5<RealState>());

  double t = t0;
  double dt = std::min(control.initial_step, control.max_step);
  try {
    while (t < t1) {
      if (sol.accepted_steps >= control.max_steps)
        throw Error(ErrorKind::StepLimitExceeded,
                    "reached " + std::to_string(control.max_steps) + " steps at t = " +
                        std::to_string(t));
      const double t_stop = next_out < output_times.size() ? output_times[next_out] : t1;
      const double remaining = t_stop - t;
      const bool clamped = dt >= remaining;
      double trial = clamped ? remaining : dt;
      const double t_before = t;
      odeint::failed_step_checker fail_checker(500);
      while (stepper.try_step(system, y, t, trial) == odeint::fail) {
        ++sol.rejected_steps;
        fail_checker();
      }
      ++sol.accepted_steps;
      if (clamped && t - t_before >= remaining) {
        t = t_stop;
        dt = std::max(dt, trial);
      } else {
        dt = trial;
      }
      if (check) check(t, as_complex(y));
      emit_due(t);
    }
  } catch (const odeint::step_adjustment_error& e) {
    throw Error(ErrorKind::StepLimitExceeded, std::string("step size collapsed: ") + e.what());
  }
  sol.final_state = unpack(y);
  return sol;
}

}  // namespace bomca::ode
