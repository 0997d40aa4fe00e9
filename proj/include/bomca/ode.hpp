#pragma once

#include <functional>
#include <span>
#include <vector>

#include "bomca/complex.hpp"

namespace bomca::ode {

/// Step-size control for the embedded Dormand-Prince 5(4) integrator.
struct StepControl {
  double rel_tol = 1e-10;
  double abs_tol = 1e-10;
  double initial_step = 1e-4;
  double max_step = 1e-2;
  long max_steps = 200000;
};

using ComplexRhs = std::function<void(double t, std::span<const Complex> y, std::span<Complex> dydt)>;

/// Invoked after every accepted step; throw to abort the integration.
using StepCheck = std::function<void(double t, std::span<const Complex> y)>;

struct Sample {
  double t;
  std::vector<Complex> y;
};

struct Solution {
  std::vector<Complex> final_state;
  std::vector<Sample> samples;  // one per requested output time
  long accepted_steps = 0;
  long rejected_steps = 0;
};

/// Integrates y' = rhs(t, y) on a complex state from t0 to t1. Each complex
/// component is handled as two reals by the error controller. Steps are
/// clamped so that every output time (and t1) is hit exactly.
///
/// Throws Error(StepLimitExceeded) when `max_steps` accepted steps do not
/// reach t1 or the step size collapses.
Solution integrate(const ComplexRhs& rhs, std::vector<Complex> y0, double t0, double t1,
                   const StepControl& control, std::span<const double> output_times = {},
                   const StepCheck& check = {});

}  // namespace bomca::ode
