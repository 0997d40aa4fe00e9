#pragma once

#include <optional>
#include <span>
#include <vector>

#include "bomca/complex.hpp"
#include "bomca/error.hpp"
#include "bomca/hierarchy.hpp"
#include "bomca/model.hpp"

namespace bomca {

/// Everything needed to launch one trajectory and carry it to t_f.
struct LaunchProblem {
  GaussianWavepacket wavepacket;
  SystemSpec system;
  TruncationOrder order;
  double t_f;
  IntegratorConfig integrator;

  Propagation propagate(Complex x0) const;
  /// Free-Gaussian inverse map of a real arrival point; exact when V = 0.
  Complex free_rewind(double target_x) const;
};

struct ManifoldConfig {
  double landing_tolerance = 1e-4;  // on |Im x_f|
  double seed_window = 1e-3;        // |Re x_f - target| accepted for a seed
  double newton_tolerance = 1e-10;  // |x_f - target| at which Newton stops
  int max_newton_iters = 40;
  double max_newton_step = 0.25;    // cap on |dx0| per Newton update
  double fd_step = 1e-6;            // probe for dx_f/dx0
  int max_recenter = 1;
  double stall_threshold = 1e-3;    // fraction of the march step
  double max_gap_ratio = 4.0;

  void validate() const;
};

enum class SampleStatus { Ok, Dead };

struct ManifoldSample {
  Complex x0;
  Complex x_f;
  Complex S_f;
  Complex v_f;
  std::vector<Complex> stack;  // v^(0)..v^(N) at arrival
  SampleStatus status = SampleStatus::Ok;
  std::optional<ErrorKind> failure;

  bool ok() const { return status == SampleStatus::Ok; }
};

struct Seed {
  Complex x0;
  Complex jacobian;  // dx_f / dx0 at the seed
  TrajectoryState arrival;
  int iterations = 0;
};

/// Launch point whose trajectory lands on target_x at t_f: damped Newton on
/// the analytic map x0 -> x_f with a finite-difference derivative, started
/// from the free-Gaussian rewind. Falls back to continuation in the
/// potential strength when direct Newton fails.
///
/// Errors: SeedNotFound, DeadRegion (every probe died).
Seed find_seed(const LaunchProblem& problem, const ManifoldConfig& cfg, double target_x);

/// Marches `count` launch points away from the seed along the real arrival
/// axis, Re x_f advancing by `direction * dx_real` per step. The first
/// element of the result is the seed itself.
///
/// Errors: ManifoldStall. Trajectory failures produce dead samples.
std::vector<ManifoldSample> march_manifold(const LaunchProblem& problem, const ManifoldConfig& cfg,
                                           const Seed& seed, int direction, int count,
                                           double dx_real);

/// Samples covering [x_lo, x_hi] with `count` equally spaced arrivals,
/// seeded at the grid point nearest `seed_target` and marched both ways.
/// Returned left to right.
std::vector<ManifoldSample> trace_manifold(const LaunchProblem& problem, const ManifoldConfig& cfg,
                                           double x_lo, double x_hi, int count,
                                           double seed_target);

/// The stretch of `samples` around `anchor` (an ok sample) in which no run
/// of consecutive dead samples is longer than `max_dead_run`. Live samples
/// beyond such a run belong to a part of the manifold the march lost track of.
std::span<const ManifoldSample> covered_run(std::span<const ManifoldSample> samples,
                                            std::size_t anchor, int max_dead_run);

struct ReconstructionOptions {
  double t_f = 0.0;
  double landing_tolerance = 1e-4;
  double max_gap_ratio = 4.0;
};

struct ReconstructedWavefunction {
  std::vector<double> grid;
  std::vector<Complex> psi;
  double t_f = 0.0;
  int order = 0;
  std::size_t trajectories = 0;
  double landing_tolerance = 0.0;
};

/// Action of a sample carried from x_f to Re x_f by the Taylor series
/// S^(k+1) = m v^(k), using every carried derivative.
Complex project_action(const ManifoldSample& sample, double mass);

/// Spline of the real-axis action over Re x_f, evaluated on `grid`, then
/// psi = exp(i S / hbar). `samples` must be in manifold order.
///
/// Errors: InsufficientCoverage, NonMonotonicArrivals.
ReconstructedWavefunction reconstruct_wavefunction(std::span<const ManifoldSample> samples,
                                                   std::span<const double> grid,
                                                   const SystemSpec& sys,
                                                   const ReconstructionOptions& opts = {});

/// Relative density |psi|^2 / max|psi|^2 allowed at the right grid edge.
inline constexpr double kSupportCutoff = 1e-8;

/// T = integral over x > 0 of |psi|^2 by composite Simpson on a uniform grid.
///
/// Errors: SupportNotContained.
double transmission_probability(const ReconstructedWavefunction& psi,
                                double support_cutoff = kSupportCutoff);
double transmission_probability(std::span<const double> grid, std::span<const Complex> psi,
                                double support_cutoff = kSupportCutoff);

struct HjResidual {
  std::vector<double> grid;  // interior points of the input grid
  std::vector<double> residual;
};

/// |S_t + S_x^2 / 2m + V - (i hbar / 2m) S_xx| from three snapshots at
/// t - d, t, t + d on a common uniform grid, with S = -i hbar ln psi on the
/// continuous branch anchored at the largest |psi|.
///
/// Errors: NodeOnGrid when |psi| < node_cutoff anywhere.
HjResidual hj_residual(const ReconstructedWavefunction& before,
                       const ReconstructedWavefunction& center,
                       const ReconstructedWavefunction& after, const SystemSpec& sys,
                       double node_cutoff = 1e-150);

}  // namespace bomca
