#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "bomca/hierarchy.hpp"
#include "bomca/manifold.hpp"
#include "bomca/model.hpp"
#include "bomca/reference.hpp"

namespace bomca {

enum class WindowKind { Transmitted, Reflected, Explicit };

/// Real interval the marched arrivals should cover.
struct WindowSpec {
  WindowKind kind = WindowKind::Transmitted;
  double x_lo = 0.0;  // Explicit only
  double x_hi = 0.0;
  /// Explicit only; defaults to the middle of the interval.
  std::optional<double> seed;

  static WindowSpec transmitted() { return WindowSpec{}; }
  static WindowSpec reflected() {
    WindowSpec w;
    w.kind = WindowKind::Reflected;
    return w;
  }
  static WindowSpec interval(double lo, double hi, std::optional<double> seed = {}) {
    WindowSpec w;
    w.kind = WindowKind::Explicit;
    w.x_lo = lo;
    w.x_hi = hi;
    w.seed = seed;
    return w;
  }
};

/// Uniform reconstruction grid; must lie inside every window's covered span.
struct SampleGrid {
  double x_min = 0.0;
  double x_max = 0.0;
  int points = 0;

  std::vector<double> values() const;
};

struct RunSpec {
  std::optional<double> t_f;  // unset: asymptotic time from the oracle flux check
  std::vector<int> orders{1};
  int trajectories = 50;
  double march_step = 0.0;  // <= 0: derived from the window and trajectory count
  std::vector<WindowSpec> windows{WindowSpec::transmitted()};
  /// Unset: oracle grid points inside the covered span (wavefunction only).
  std::optional<SampleGrid> grid;
  std::vector<double> energies;  // transmission sweeps only
  int paths = 10;                // dense paths written by `trajectories`
  int path_samples = 201;        // output times per dense path
  IntegratorConfig integrator;
  ManifoldConfig manifold;
};

struct OracleSpec {
  GridSpec grid;
  double dt = 1e-4;
  bool absorber = false;
  double flux_tolerance = 0.02;
  double t_start = 1.0;
  double t_step = 0.25;
  double t_max = 4.0;
};

struct OutputSpec {
  std::string directory = "out";
  std::vector<std::string> formats{"csv", "json"};
};

struct ScenarioConfig {
  std::string name = "custom";
  double mass = 30.0;
  double hbar = 1.0;
  PotentialModel potential = PotentialModel::eckart(40.0, 4.32);
  double alpha = 30.0 * kPi;
  double x_c = -0.7;
  std::optional<double> p_c;
  std::optional<double> energy;
  RunSpec run;
  OracleSpec oracle;
  OutputSpec output;

  /// Errors: InvalidConfig.
  void validate() const;

  SystemSpec system() const;
  /// Momentum from p_c, or +sqrt(2 m E).
  double momentum() const;
  GaussianWavepacket wavepacket() const;
  GaussianWavepacket wavepacket_at_energy(double energy) const;
  TransmissionOptions transmission_options() const;
  bool wants_format(const std::string& format) const;
};

/// Parses a YAML scenario; unknown keys and type mismatches are InvalidConfig.
ScenarioConfig parse_config(const std::string& yaml_text);
ScenarioConfig load_config(const std::string& path);

/// Names accepted by preset(): fig1, fig2a, fig2b, fig3, free.
std::vector<std::string> preset_names();
ScenarioConfig preset(const std::string& name);

/// Fully resolved config. JSON is a YAML subset, so
/// parse_config(to_json(c).dump()) reproduces c.
nlohmann::json to_json(const ScenarioConfig& config);

}  // namespace bomca
