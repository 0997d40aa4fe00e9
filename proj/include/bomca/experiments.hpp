#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bomca/manifold.hpp"
#include "bomca/reference.hpp"
#include "bomca/scenario.hpp"

namespace bomca {

/// Arrival interval [x_lo, x_hi] sampled by `count` equally spaced targets.
struct Window {
  std::string label;
  double x_lo = 0.0;
  double x_hi = 0.0;
  double seed_target = 0.0;
  int count = 0;

  double step() const { return (x_hi - x_lo) / (count - 1); }
};

/// Standard deviation of |psi|^2 for the freely spreading packet at time t.
double packet_width(const GaussianWavepacket& wp, const SystemSpec& sys, double t);

/// Transmitted: [-2 dx, max(center, 0) + 8 width], seeded halfway.
/// Reflected: [min(x_c - |p_c| t/m, x_c) - 8 width, 2 dx], seeded at x_c.
Window resolve_window(const WindowSpec& spec, const GaussianWavepacket& wp, const SystemSpec& sys,
                      double t_f, int trajectories, double march_step);

struct ManifoldRun {
  Window window;
  std::vector<ManifoldSample> samples;  // left to right
  std::size_t covered_begin = 0;        // covered run [begin, end)
  std::size_t covered_end = 0;

  std::span<const ManifoldSample> covered() const {
    return std::span(samples).subspan(covered_begin, covered_end - covered_begin);
  }
  std::size_t live() const;
};

/// Seeds, marches both ways and locates the covered run around the seed.
ManifoldRun march_window(const LaunchProblem& problem, const ManifoldConfig& cfg,
                         const Window& window);

/// Reconstruction on the points of `grid` that fall inside the covered run.
ReconstructedWavefunction reconstruct_run(const ManifoldRun& run, const GridSpec& grid,
                                          const SystemSpec& sys, const ManifoldConfig& cfg,
                                          double t_f);

/// Reconstruction on exactly `grid`; InsufficientCoverage unless the
/// covered run spans it.
ReconstructedWavefunction reconstruct_run(const ManifoldRun& run, std::span<const double> grid,
                                          const SystemSpec& sys, const ManifoldConfig& cfg,
                                          double t_f);

/// Split-operator state at time t on the oracle grid.
GridWavefunction oracle_state(const ScenarioConfig& config, const GaussianWavepacket& wp,
                              double t);

struct RunContext {
  std::filesystem::path out;
  int threads = 1;
  std::ostream* log = nullptr;
};

struct Failure {
  std::string item;
  std::string error;
};

struct TrajectoriesReport {
  double t_f = 0.0;
  std::vector<std::pair<int, ManifoldRun>> runs;  // (order, run)
  std::vector<std::filesystem::path> files;
  std::vector<Failure> failures;
};

TrajectoriesReport run_trajectories(const ScenarioConfig& config, const RunContext& ctx);

struct OrderDeviation {
  int order = 0;
  std::optional<double> l2_deviation;  // of |psi| against the oracle
  std::optional<double> max_deviation;
  std::size_t trajectories = 0;
};

struct WavefunctionReport {
  double t_f = 0.0;
  std::vector<OrderDeviation> orders;
  std::vector<std::filesystem::path> files;
  std::vector<Failure> failures;
};

WavefunctionReport run_wavefunction(const ScenarioConfig& config, const RunContext& ctx);

struct OrderTransmission {
  int order = 0;
  std::optional<double> transmission;
  std::optional<double> relative_divergence;
  std::size_t trajectories = 0;
  std::string error;
};

struct TransmissionEntry {
  double energy = 0.0;
  double t_f = 0.0;
  std::optional<ExactTransmission> exact;
  std::string exact_error;
  std::vector<OrderTransmission> orders;
};

struct TransmissionCurve {
  std::vector<TransmissionEntry> entries;
  std::vector<std::filesystem::path> files;
  std::vector<Failure> failures;
};

/// Errors: InvalidConfig for an empty energy list.
TransmissionCurve run_transmission(const ScenarioConfig& config, const RunContext& ctx);

struct OracleReport {
  ExactTransmission result;
  std::vector<std::filesystem::path> files;
  std::vector<Failure> failures;
};

OracleReport run_oracle(const ScenarioConfig& config, const RunContext& ctx);

/// Quick internal consistency checks; one PASS/FAIL line each. Returns the
/// number of failed checks.
int run_selftest(std::ostream& os);

}  // namespace bomca
