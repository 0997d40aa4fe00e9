#include "bomca/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "bomca/quadrature.hpp"
#include "bomca/spline.hpp"

namespace bomca {

namespace {

bool is_finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

ManifoldSample make_sample(Complex x0, const TrajectoryState& arrival) {
  return ManifoldSample{x0, arrival.x, arrival.S, arrival.v.front(), arrival.v,
                        SampleStatus::Ok, std::nullopt};
}

ManifoldSample dead_sample(Complex x0, ErrorKind kind) {
  ManifoldSample s{x0, Complex{}, Complex{}, Complex{}, {}, SampleStatus::Dead, kind};
  return s;
}

// dx_f/dx0 by a forward difference; falls back to a backward probe when the
// forward trajectory dies.
Complex arrival_derivative(const LaunchProblem& problem, const ManifoldConfig& cfg, Complex x0,
                           Complex x_f) {
  const double h = cfg.fd_step;
  try {
    return (problem.propagate(x0 + h).final_state.x - x_f) / h;
  } catch (const Error& e) {
    if (!is_trajectory_failure(e.kind())) throw;
  }
  return (x_f - problem.propagate(x0 - h).final_state.x) / h;
}

struct NewtonOutcome {
  std::optional<Seed> seed;
  bool any_alive = false;
};

NewtonOutcome newton_seed(const LaunchProblem& problem, const ManifoldConfig& cfg, double target,
                          Complex x0) {
  NewtonOutcome out;
  TrajectoryState arrival;
  try {
    arrival = problem.propagate(x0).final_state;
  } catch (const Error& e) {
    if (!is_trajectory_failure(e.kind())) throw;
    return out;
  }
  out.any_alive = true;

  auto accept = [&](int iterations) {
    const Complex jac = arrival_derivative(problem, cfg, x0, arrival.x);
    out.seed = Seed{x0, jac, arrival, iterations};
  };
  auto loosely_landed = [&] {
    return std::abs(arrival.x.imag()) <= cfg.landing_tolerance &&
           std::abs(arrival.x.real() - target) <= cfg.seed_window;
  };

  for (int it = 0; it < cfg.max_newton_iters; ++it) {
    const Complex residual = arrival.x - target;
    if (std::abs(residual) <= cfg.newton_tolerance) {
      accept(it);
      return out;
    }
    Complex jac;
    try {
      jac = arrival_derivative(problem, cfg, x0, arrival.x);
    } catch (const Error& e) {
      if (!is_trajectory_failure(e.kind())) throw;
      break;
    }
    if (!is_finite(jac) || std::abs(jac) == 0.0) break;
    Complex step = -residual / jac;
    if (std::abs(step) > cfg.max_newton_step) step *= cfg.max_newton_step / std::abs(step);

    bool improved = false;
    for (double lambda = 1.0; lambda >= 1.0 / 64.0; lambda *= 0.5) {
      const Complex trial = x0 + lambda * step;
      try {
        const TrajectoryState next = problem.propagate(trial).final_state;
        if (std::abs(next.x - target) < std::abs(residual)) {
          x0 = trial;
          arrival = next;
          improved = true;
          break;
        }
      } catch (const Error& e) {
        if (!is_trajectory_failure(e.kind())) throw;
      }
    }
    if (!improved) break;
  }
  if (loosely_landed()) accept(cfg.max_newton_iters);
  return out;
}

LaunchProblem with_potential(const LaunchProblem& p, PotentialModel potential) {
  return LaunchProblem{p.wavepacket,
                       SystemSpec(p.system.mass(), std::move(potential), p.system.hbar()),
                       p.order, p.t_f, p.integrator};
}

}  // namespace

Propagation LaunchProblem::propagate(Complex x0) const {
  return propagate_trajectory(x0, wavepacket, system, order, t_f, integrator);
}

Complex LaunchProblem::free_rewind(double target_x) const {
  const double m = system.mass();
  const double xc = wavepacket.center();
  const Complex spread = 1.0 + 2.0 * kI * system.hbar() * wavepacket.alpha() * t_f / m;
  return xc + (target_x - xc - wavepacket.momentum() * t_f / m) / spread;
}

void ManifoldConfig::validate() const {
  if (!(landing_tolerance > 0.0) || !(seed_window > 0.0) || !(newton_tolerance > 0.0) ||
      !(fd_step > 0.0) || !(max_newton_step > 0.0) || !(stall_threshold > 0.0) ||
      !(max_gap_ratio > 1.0))
    throw Error(ErrorKind::InvalidArgument, "manifold tolerances must be positive");
  if (max_newton_iters < 1 || max_recenter < 0)
    throw Error(ErrorKind::InvalidArgument, "manifold iteration limits must be positive");
}

Seed find_seed(const LaunchProblem& problem, const ManifoldConfig& cfg, double target_x) {
  cfg.validate();
  NewtonOutcome direct = newton_seed(problem, cfg, target_x, problem.free_rewind(target_x));
  if (direct.seed) return *direct.seed;
  bool any_alive = direct.any_alive;

  // Continuation in the potential strength, starting from the exact free map.
  const PotentialModel& full = problem.system.potential();
  if (!full.as<FreeSpace>()) {
    double lambda = 0.0;
    double dlambda = 0.125;
    Complex x0 = problem.free_rewind(target_x);
    while (lambda < 1.0 && dlambda >= 1.0 / 1024.0) {
      const double next = std::min(1.0, lambda + dlambda);
      const LaunchProblem stage = with_potential(problem, full.scaled(next));
      NewtonOutcome step = newton_seed(stage, cfg, target_x, x0);
      any_alive = any_alive || step.any_alive;
      if (step.seed) {
        x0 = step.seed->x0;
        lambda = next;
        dlambda = std::min(0.25, 1.5 * dlambda);
        if (lambda >= 1.0) {
          step.seed->iterations += cfg.max_newton_iters;
          return *step.seed;
        }
      } else {
        dlambda *= 0.5;
      }
    }
  }
  if (!any_alive)
    throw Error(ErrorKind::DeadRegion,
                "every probe trajectory died while seeding target " + std::to_string(target_x));
  throw Error(ErrorKind::SeedNotFound, "no launch point lands on " + std::to_string(target_x));
}

std::vector<ManifoldSample> march_manifold(const LaunchProblem& problem, const ManifoldConfig& cfg,
                                           const Seed& seed, int direction, int count,
                                           double dx_real) {
  cfg.validate();
  if (direction != 1 && direction != -1)
    throw Error(ErrorKind::InvalidArgument, "march direction must be +1 or -1");
  if (!(dx_real > 0.0)) throw Error(ErrorKind::InvalidArgument, "march step must be positive");
  if (count < 0) throw Error(ErrorKind::InvalidArgument, "march count must be non-negative");

  std::vector<ManifoldSample> out;
  out.reserve(static_cast<std::size_t>(count) + 1);
  out.push_back(make_sample(seed.x0, seed.arrival));

  // Recent live (x_f, x0) pairs; the launch point for the next target is
  // extrapolated from them along the analytic map x_f -> x0.
  std::vector<std::pair<Complex, Complex>> history{{seed.arrival.x, seed.x0}};
  const Complex seed_ratio = 1.0 / seed.jacobian;  // dx0/dx_f
  const double base = seed.arrival.x.real();

  auto predict = [&](double target) {
    const std::size_t h = history.size();
    if (h == 1) return history[0].second + seed_ratio * (target - history[0].first);
    if (h == 2) {
      const auto& [a, fa] = history[0];
      const auto& [b, fb] = history[1];
      return fb + (fb - fa) / (b - a) * (target - b);
    }
    const auto& [a, fa] = history[h - 3];
    const auto& [b, fb] = history[h - 2];
    const auto& [c, fc] = history[h - 1];
    const Complex z = target;
    return fa * (z - b) * (z - c) / ((a - b) * (a - c)) +
           fb * (z - a) * (z - c) / ((b - a) * (b - c)) +
           fc * (z - a) * (z - b) / ((c - a) * (c - b));
  };

  for (int j = 1; j <= count; ++j) {
    const double target = base + direction * j * dx_real;
    Complex x0 = predict(target);
    try {
      TrajectoryState arrival = problem.propagate(x0).final_state;
      for (int k = 0; k < cfg.max_recenter && std::abs(arrival.x.imag()) > cfg.landing_tolerance;
           ++k) {
        const Complex jac = arrival_derivative(problem, cfg, x0, arrival.x);
        x0 += (target - arrival.x) / jac;
        arrival = problem.propagate(x0).final_state;
      }
      if (std::abs(arrival.x.imag()) > cfg.landing_tolerance) {
        out.push_back(dead_sample(x0, ErrorKind::LandingFailed));
        continue;
      }
      const Complex advance = arrival.x - history.back().first;
      if (std::abs(advance) < cfg.stall_threshold * dx_real || direction * advance.real() <= 0.0)
        throw Error(ErrorKind::ManifoldStall, "arrivals stopped advancing near Re x_f = " +
                                                  std::to_string(history.back().first.real()));
      history.emplace_back(arrival.x, x0);
      if (history.size() > 3) history.erase(history.begin());
      out.push_back(make_sample(x0, arrival));
    } catch (const Error& e) {
      if (!is_trajectory_failure(e.kind())) throw;
      out.push_back(dead_sample(x0, e.kind()));
    }
  }
  return out;
}

std::vector<ManifoldSample> trace_manifold(const LaunchProblem& problem, const ManifoldConfig& cfg,
                                           double x_lo, double x_hi, int count,
                                           double seed_target) {
  if (!(x_hi > x_lo) || count < 2)
    throw Error(ErrorKind::InvalidArgument, "manifold window needs x_hi > x_lo and count >= 2");
  const double dx = (x_hi - x_lo) / (count - 1);
  const int j_seed =
      std::clamp(static_cast<int>(std::lround((seed_target - x_lo) / dx)), 0, count - 1);
  const Seed seed = find_seed(problem, cfg, x_lo + j_seed * dx);

  auto left = march_manifold(problem, cfg, seed, -1, j_seed, dx);
  auto right = march_manifold(problem, cfg, seed, +1, count - 1 - j_seed, dx);
  std::vector<ManifoldSample> out;
  out.reserve(left.size() + right.size() - 1);
  out.insert(out.end(), std::make_move_iterator(left.rbegin()),
             std::make_move_iterator(left.rend()));
  out.insert(out.end(), std::make_move_iterator(right.begin() + 1),
             std::make_move_iterator(right.end()));
  return out;
}

std::span<const ManifoldSample> covered_run(std::span<const ManifoldSample> samples,
                                            std::size_t anchor, int max_dead_run) {
  if (anchor >= samples.size() || !samples[anchor].ok())
    throw Error(ErrorKind::InvalidArgument, "covered_run needs a live anchor sample");
  std::size_t lo = anchor, hi = anchor;
  for (std::size_t i = anchor + 1, dead = 0; i < samples.size(); ++i) {
    if (samples[i].ok()) {
      hi = i;
      dead = 0;
    } else if (static_cast<int>(++dead) > max_dead_run) {
      break;
    }
  }
  for (std::size_t i = anchor, dead = 0; i-- > 0;) {
    if (samples[i].ok()) {
      lo = i;
      dead = 0;
    } else if (static_cast<int>(++dead) > max_dead_run) {
      break;
    }
  }
  return samples.subspan(lo, hi - lo + 1);
}

Complex project_action(const ManifoldSample& sample, double mass) {
  const Complex delta = Complex(sample.x_f.real()) - sample.x_f;
  Complex S = sample.S_f;
  Complex power = delta;
  double factorial = 1.0;
  for (std::size_t k = 0; k < sample.stack.size(); ++k) {
    factorial *= static_cast<double>(k + 1);
    S += mass * sample.stack[k] * power / factorial;
    power *= delta;
  }
  return S;
}

ReconstructedWavefunction reconstruct_wavefunction(std::span<const ManifoldSample> samples,
                                                   std::span<const double> grid,
                                                   const SystemSpec& sys,
                                                   const ReconstructionOptions& opts) {
  if (grid.empty()) throw Error(ErrorKind::InvalidArgument, "empty reconstruction grid");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1]))
      throw Error(ErrorKind::InvalidArgument, "reconstruction grid must be strictly increasing");

  std::vector<double> xs;
  std::vector<Complex> actions;
  int order = 0;
  for (const auto& s : samples) {
    if (!s.ok()) continue;
    const double xr = s.x_f.real();
    if (!xs.empty() && std::abs(xr - xs.back()) <= 1e-12 * (1.0 + std::abs(xr))) continue;
    xs.push_back(xr);
    actions.push_back(project_action(s, sys.mass()));
    order = static_cast<int>(s.stack.size()) - 1;
  }
  if (xs.size() < 4)
    throw Error(ErrorKind::InsufficientCoverage,
                "need at least 4 live samples, have " + std::to_string(xs.size()));

  const bool increasing = xs[1] > xs[0];
  for (std::size_t i = 1; i < xs.size(); ++i)
    if ((xs[i] > xs[i - 1]) != increasing)
      throw Error(ErrorKind::NonMonotonicArrivals,
                  "arrival " + std::to_string(i) + " at Re x_f = " + std::to_string(xs[i]) +
                      " breaks the ordering");
  if (!increasing) {
    std::reverse(xs.begin(), xs.end());
    std::reverse(actions.begin(), actions.end());
  }

  const double span_lo = xs.front(), span_hi = xs.back();
  const double slack = 1e-12 * (1.0 + std::abs(span_hi - span_lo));
  if (grid.front() < span_lo - slack || grid.back() > span_hi + slack)
    throw Error(ErrorKind::InsufficientCoverage,
                "grid [" + std::to_string(grid.front()) + ", " + std::to_string(grid.back()) +
                    "] exceeds sample span [" + std::to_string(span_lo) + ", " +
                    std::to_string(span_hi) + "]");
  const double mean_gap = (span_hi - span_lo) / static_cast<double>(xs.size() - 1);
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (xs[i] - xs[i - 1] > opts.max_gap_ratio * mean_gap)
      throw Error(ErrorKind::InsufficientCoverage,
                  "gap after Re x_f = " + std::to_string(xs[i - 1]) + " exceeds " +
                      std::to_string(opts.max_gap_ratio) + " mean spacings");

  const std::size_t live = xs.size();
  const ComplexSpline spline(std::move(xs), std::move(actions));
  ReconstructedWavefunction out;
  out.grid.assign(grid.begin(), grid.end());
  out.psi.reserve(grid.size());
  for (double x : grid) out.psi.push_back(std::exp(kI * spline(x) / sys.hbar()));
  out.t_f = opts.t_f;
  out.order = order;
  out.trajectories = live;
  out.landing_tolerance = opts.landing_tolerance;
  return out;
}

double transmission_probability(std::span<const double> grid, std::span<const Complex> psi,
                                double support_cutoff) {
  const std::size_t n = grid.size();
  if (n < 2 || psi.size() != n)
    throw Error(ErrorKind::InvalidArgument, "transmission needs a grid of at least two points");
  const double h = (grid.back() - grid.front()) / static_cast<double>(n - 1);
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs(grid[i] - grid[i - 1] - h) > 1e-9 * h)
      throw Error(ErrorKind::InvalidArgument, "transmission quadrature needs a uniform grid");

  std::vector<double> density(n);
  for (std::size_t i = 0; i < n; ++i) density[i] = std::norm(psi[i]);
  const double peak = *std::max_element(density.begin(), density.end());
  if (density.back() > support_cutoff * peak)
    throw Error(ErrorKind::SupportNotContained,
                "|psi|^2 at the right edge x = " + std::to_string(grid.back()) +
                    " is not negligible");

  const auto first = static_cast<std::size_t>(
      std::distance(grid.begin(), std::lower_bound(grid.begin(), grid.end(), 0.0)));
  if (first == n) return 0.0;
  double total = simpson(std::span(density).subspan(first), h);
  if (first > 0 && grid[first] > 0.0) {
    // Piece between x = 0 and the first non-negative node, linearly interpolated.
    const double w = -grid[first - 1] / h;
    const double at_zero = (1.0 - w) * density[first - 1] + w * density[first];
    total += 0.5 * grid[first] * (at_zero + density[first]);
  }
  return total;
}

double transmission_probability(const ReconstructedWavefunction& psi, double support_cutoff) {
  return transmission_probability(psi.grid, psi.psi, support_cutoff);
}

namespace {

// -i hbar ln psi, continuous along the grid, pinned to the principal branch
// (shifted by 2 pi k to sit within pi of `anchor_phase`) at `anchor`.
std::vector<Complex> continuous_action(std::span<const Complex> psi, std::size_t anchor,
                                       double anchor_phase, double hbar) {
  const std::size_t n = psi.size();
  std::vector<double> phase(n);
  double a = std::arg(psi[anchor]);
  a += 2.0 * kPi * std::round((anchor_phase - a) / (2.0 * kPi));
  phase[anchor] = a;
  auto step = [&](std::size_t from, std::size_t to) {
    double d = std::arg(psi[to]) - std::arg(psi[from]);
    d -= 2.0 * kPi * std::round(d / (2.0 * kPi));
    phase[to] = phase[from] + d;
  };
  for (std::size_t i = anchor + 1; i < n; ++i) step(i - 1, i);
  for (std::size_t i = anchor; i-- > 0;) step(i + 1, i);

  std::vector<Complex> S(n);
  for (std::size_t i = 0; i < n; ++i)
    S[i] = -kI * hbar * Complex(std::log(std::abs(psi[i])), phase[i]);
  return S;
}

}  // namespace

HjResidual hj_residual(const ReconstructedWavefunction& before,
                       const ReconstructedWavefunction& center,
                       const ReconstructedWavefunction& after, const SystemSpec& sys,
                       double node_cutoff) {
  const std::size_t n = center.grid.size();
  if (n < 3 || before.grid != center.grid || after.grid != center.grid ||
      before.psi.size() != n || center.psi.size() != n || after.psi.size() != n)
    throw Error(ErrorKind::InvalidArgument, "residual snapshots must share one grid");
  const double delta = 0.5 * (after.t_f - before.t_f);
  if (!(delta > 0.0) ||
      std::abs((center.t_f - before.t_f) - (after.t_f - center.t_f)) > 1e-9 * delta)
    throw Error(ErrorKind::InvalidArgument, "residual snapshots must be equally spaced in time");
  const double h = (center.grid.back() - center.grid.front()) / static_cast<double>(n - 1);
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs(center.grid[i] - center.grid[i - 1] - h) > 1e-9 * h)
      throw Error(ErrorKind::InvalidArgument, "residual needs a uniform grid");
  for (const auto* w : {&before, &center, &after})
    for (std::size_t i = 0; i < n; ++i)
      if (!(std::abs(w->psi[i]) >= node_cutoff))
        throw Error(ErrorKind::NodeOnGrid,
                    "|psi| below node cutoff at x = " + std::to_string(w->grid[i]));

  std::size_t anchor = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs(center.psi[i]) > std::abs(center.psi[anchor])) anchor = i;
  const double anchor_phase = std::arg(center.psi[anchor]);
  const double hbar = sys.hbar();
  const auto s_mid = continuous_action(center.psi, anchor, anchor_phase, hbar);
  const auto s_before = continuous_action(before.psi, anchor, anchor_phase, hbar);
  const auto s_after = continuous_action(after.psi, anchor, anchor_phase, hbar);

  const double m = sys.mass();
  HjResidual out;
  out.grid.reserve(n - 2);
  out.residual.reserve(n - 2);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const Complex s_t = (s_after[i] - s_before[i]) / (2.0 * delta);
    const Complex s_x = (s_mid[i + 1] - s_mid[i - 1]) / (2.0 * h);
    const Complex s_xx = (s_mid[i + 1] - 2.0 * s_mid[i] + s_mid[i - 1]) / (h * h);
    const double x = center.grid[i];
    const Complex r =
        s_t + s_x * s_x / (2.0 * m) + sys.potential()(x) - kI * hbar / (2.0 * m) * s_xx;
    out.grid.push_back(x);
    out.residual.push_back(std::abs(r));
  }
  return out;
}

}  // namespace bomca
