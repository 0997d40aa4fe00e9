#include "bomca/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include "bomca/error.hpp"

namespace bomca {

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorKind::InvalidConfig, what); }

void check_keys(const YAML::Node& node, const std::string& section,
                std::initializer_list<const char*> allowed) {
  if (!node.IsMap()) invalid("'" + section + "' must be a mapping");
  const std::set<std::string> known(allowed.begin(), allowed.end());
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!known.contains(key)) invalid("unknown key '" + key + "' in '" + section + "'");
  }
}

template <class T>
T scalar(const YAML::Node& node, const std::string& where) {
  if (!node.IsScalar()) invalid("'" + where + "' must be a scalar");
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    invalid("'" + where + "' has the wrong type");
  }
}

template <class T>
void read(const YAML::Node& parent, const char* key, const std::string& section, T& out) {
  if (const auto node = parent[key]) out = scalar<T>(node, section + "." + key);
}

PotentialModel parse_potential(const YAML::Node& node) {
  if (!node.IsMap() || !node["type"]) invalid("'system.potential' needs a 'type'");
  const auto type = scalar<std::string>(node["type"], "system.potential.type");
  try {
    if (type == "free") {
      check_keys(node, "system.potential", {"type"});
      return PotentialModel::free();
    }
    if (type == "eckart") {
      check_keys(node, "system.potential", {"type", "height", "steepness"});
      double height = 40.0, steepness = 4.32;
      read(node, "height", "system.potential", height);
      read(node, "steepness", "system.potential", steepness);
      return PotentialModel::eckart(height, steepness);
    }
    if (type == "harmonic") {
      check_keys(node, "system.potential", {"type", "stiffness"});
      double stiffness = 1.0;
      read(node, "stiffness", "system.potential", stiffness);
      return PotentialModel::harmonic(stiffness);
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidConfig) throw;
    invalid(e.what());
  }
  invalid("unknown potential type '" + type + "'");
}

WindowSpec parse_window(const YAML::Node& node) {
  if (node.IsScalar()) {
    const auto name = node.as<std::string>();
    if (name == "transmitted") return WindowSpec::transmitted();
    if (name == "reflected") return WindowSpec::reflected();
    invalid("unknown window '" + name + "'");
  }
  check_keys(node, "run.windows[]", {"x_lo", "x_hi", "seed"});
  if (!node["x_lo"] || !node["x_hi"]) invalid("explicit windows need x_lo and x_hi");
  WindowSpec w = WindowSpec::interval(0.0, 0.0);
  read(node, "x_lo", "run.windows[]", w.x_lo);
  read(node, "x_hi", "run.windows[]", w.x_hi);
  if (node["seed"]) w.seed = scalar<double>(node["seed"], "run.windows[].seed");
  return w;
}

template <class T>
std::vector<T> sequence(const YAML::Node& node, const std::string& where) {
  if (!node.IsSequence()) invalid("'" + where + "' must be a list");
  std::vector<T> out;
  for (const auto& item : node) out.push_back(scalar<T>(item, where + "[]"));
  return out;
}

void parse_integrator(const YAML::Node& node, IntegratorConfig& c) {
  const std::string s = "run.integrator";
  check_keys(node, s,
             {"rel_tol", "abs_tol", "initial_step", "max_step", "max_steps", "blowup_threshold"});
  read(node, "rel_tol", s, c.rel_tol);
  read(node, "abs_tol", s, c.abs_tol);
  read(node, "initial_step", s, c.initial_step);
  read(node, "max_step", s, c.max_step);
  read(node, "max_steps", s, c.max_steps);
  read(node, "blowup_threshold", s, c.blowup_threshold);
}

void parse_manifold(const YAML::Node& node, ManifoldConfig& c) {
  const std::string s = "run.manifold";
  check_keys(node, s,
             {"landing_tolerance", "seed_window", "newton_tolerance", "max_newton_iters",
              "max_newton_step", "fd_step", "max_recenter", "stall_threshold", "max_gap_ratio"});
  read(node, "landing_tolerance", s, c.landing_tolerance);
  read(node, "seed_window", s, c.seed_window);
  read(node, "newton_tolerance", s, c.newton_tolerance);
  read(node, "max_newton_iters", s, c.max_newton_iters);
  read(node, "max_newton_step", s, c.max_newton_step);
  read(node, "fd_step", s, c.fd_step);
  read(node, "max_recenter", s, c.max_recenter);
  read(node, "stall_threshold", s, c.stall_threshold);
  read(node, "max_gap_ratio", s, c.max_gap_ratio);
}

void parse_run(const YAML::Node& node, RunSpec& run) {
  const std::string s = "run";
  check_keys(node, s,
             {"t_f", "orders", "trajectories", "march_step", "windows", "grid", "energies", "paths",
              "path_samples", "integrator", "manifold"});
  if (const auto t = node["t_f"]) {
    if (t.IsScalar() && t.as<std::string>() == "auto")
      run.t_f.reset();
    else
      run.t_f = scalar<double>(t, "run.t_f");
  }
  if (node["orders"]) run.orders = sequence<int>(node["orders"], "run.orders");
  read(node, "trajectories", s, run.trajectories);
  read(node, "march_step", s, run.march_step);
  if (const auto w = node["windows"]) {
    if (!w.IsSequence()) invalid("'run.windows' must be a list");
    run.windows.clear();
    for (const auto& item : w) run.windows.push_back(parse_window(item));
  }
  if (const auto g = node["grid"]) {
    check_keys(g, "run.grid", {"x_min", "x_max", "points"});
    if (!g["x_min"] || !g["x_max"] || !g["points"]) invalid("'run.grid' needs x_min, x_max and points");
    SampleGrid grid;
    read(g, "x_min", "run.grid", grid.x_min);
    read(g, "x_max", "run.grid", grid.x_max);
    read(g, "points", "run.grid", grid.points);
    run.grid = grid;
  }
  if (node["energies"]) run.energies = sequence<double>(node["energies"], "run.energies");
  read(node, "paths", s, run.paths);
  read(node, "path_samples", s, run.path_samples);
  if (const auto i = node["integrator"]) parse_integrator(i, run.integrator);
  if (const auto m = node["manifold"]) parse_manifold(m, run.manifold);
}

void parse_oracle(const YAML::Node& node, OracleSpec& o) {
  const std::string s = "oracle";
  check_keys(node, s,
             {"dt", "x_min", "x_max", "points", "absorber", "flux_tolerance", "t_start", "t_step",
              "t_max"});
  read(node, "dt", s, o.dt);
  read(node, "x_min", s, o.grid.x_min);
  read(node, "x_max", s, o.grid.x_max);
  read(node, "points", s, o.grid.n_points);
  read(node, "absorber", s, o.absorber);
  read(node, "flux_tolerance", s, o.flux_tolerance);
  read(node, "t_start", s, o.t_start);
  read(node, "t_step", s, o.t_step);
  read(node, "t_max", s, o.t_max);
}

void parse_output(const YAML::Node& node, OutputSpec& o) {
  check_keys(node, "output", {"directory", "formats"});
  read(node, "directory", "output", o.directory);
  if (node["formats"]) o.formats = sequence<std::string>(node["formats"], "output.formats");
}

void require(bool ok, const std::string& what) {
  if (!ok) invalid(what);
}

}  // namespace

std::vector<double> SampleGrid::values() const {
  std::vector<double> x(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) x[i] = x_min + (x_max - x_min) * i / (points - 1);
  return x;
}

void ScenarioConfig::validate() const {
  require(mass > 0.0 && std::isfinite(mass), "mass must be positive");
  require(hbar > 0.0 && std::isfinite(hbar), "hbar must be positive");
  require(alpha > 0.0 && std::isfinite(alpha), "alpha must be positive");
  require(std::isfinite(x_c), "x_c must be finite");
  require(p_c.has_value() != energy.has_value(),
          "exactly one of wavepacket.p_c and wavepacket.energy must be given");
  if (p_c) require(std::isfinite(*p_c), "p_c must be finite");
  if (energy) require(*energy >= 0.0 && std::isfinite(*energy), "energy must be non-negative");

  require(!run.orders.empty(), "run.orders must not be empty");
  for (int n : run.orders)
    require(n >= TruncationOrder::kMin && n <= TruncationOrder::kMax,
            "truncation order " + std::to_string(n) + " outside 1..8");
  if (run.t_f) require(*run.t_f > 0.0, "run.t_f must be positive");
  require(run.trajectories >= 5, "run.trajectories must be at least 5");
  require(std::isfinite(run.march_step), "run.march_step must be finite");
  require(!run.windows.empty(), "run.windows must not be empty");
  for (const auto& w : run.windows)
    if (w.kind == WindowKind::Explicit)
      require(w.x_hi > w.x_lo, "explicit window needs x_hi > x_lo");
  if (run.grid)
    require(run.grid->points >= 2 && run.grid->x_max > run.grid->x_min,
            "run.grid needs x_max > x_min and at least 2 points");
  for (double e : run.energies)
    require(e >= 0.0 && std::isfinite(e), "run.energies must be non-negative");
  require(run.paths >= 1 && run.path_samples >= 2, "run.paths and run.path_samples too small");
  try {
    run.integrator.validate();
    run.manifold.validate();
    oracle.grid.validate();
  } catch (const Error& e) {
    invalid(e.what());
  }
  require(oracle.dt > 0.0, "oracle.dt must be positive");
  require(oracle.flux_tolerance > 0.0, "oracle.flux_tolerance must be positive");
  require(oracle.t_start > 0.0 && oracle.t_step > 0.0 && oracle.t_max >= oracle.t_start,
          "oracle times need 0 < t_start <= t_max and t_step > 0");

  require(!output.directory.empty(), "output.directory must not be empty");
  require(!output.formats.empty(), "output.formats must not be empty");
  for (const auto& f : output.formats)
    require(f == "csv" || f == "json", "unknown output format '" + f + "'");
}

SystemSpec ScenarioConfig::system() const { return SystemSpec(mass, potential, hbar); }

double ScenarioConfig::momentum() const {
  return p_c ? *p_c : std::sqrt(2.0 * mass * energy.value_or(0.0));
}

GaussianWavepacket ScenarioConfig::wavepacket() const {
  return GaussianWavepacket(alpha, x_c, momentum());
}

GaussianWavepacket ScenarioConfig::wavepacket_at_energy(double e) const {
  return GaussianWavepacket::from_energy(alpha, x_c, e, mass);
}

TransmissionOptions ScenarioConfig::transmission_options() const {
  TransmissionOptions t;
  t.grid = oracle.grid;
  t.dt = oracle.dt;
  if (oracle.absorber) t.propagation.absorber = AbsorberSpec{};
  t.flux_tolerance = oracle.flux_tolerance;
  return t;
}

bool ScenarioConfig::wants_format(const std::string& format) const {
  return std::find(output.formats.begin(), output.formats.end(), format) != output.formats.end();
}

ScenarioConfig parse_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    invalid(std::string("malformed config: ") + e.what());
  }
  if (!root.IsMap()) invalid("config must be a mapping");
  check_keys(root, "config", {"name", "system", "wavepacket", "run", "oracle", "output"});

  ScenarioConfig c;
  read(root, "name", "config", c.name);
  if (const auto sys = root["system"]) {
    check_keys(sys, "system", {"mass", "hbar", "potential"});
    read(sys, "mass", "system", c.mass);
    read(sys, "hbar", "system", c.hbar);
    if (sys["potential"]) c.potential = parse_potential(sys["potential"]);
  }
  if (const auto wp = root["wavepacket"]) {
    check_keys(wp, "wavepacket", {"alpha", "x_c", "p_c", "energy"});
    read(wp, "alpha", "wavepacket", c.alpha);
    read(wp, "x_c", "wavepacket", c.x_c);
    if (wp["p_c"]) c.p_c = scalar<double>(wp["p_c"], "wavepacket.p_c");
    if (wp["energy"]) c.energy = scalar<double>(wp["energy"], "wavepacket.energy");
  }
  if (const auto run = root["run"]) parse_run(run, c.run);
  if (const auto oracle = root["oracle"]) parse_oracle(oracle, c.oracle);
  if (const auto out = root["output"]) parse_output(out, c.output);
  c.validate();
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) invalid("cannot read config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::vector<std::string> preset_names() { return {"fig1", "fig2a", "fig2b", "fig3", "free"}; }

ScenarioConfig preset(const std::string& name) {
  ScenarioConfig c;
  c.name = name;
  if (name == "fig1") {
    c.energy = 0.0;
    c.run.t_f = 1.0;
    c.run.orders = {1};
  } else if (name == "fig2a") {
    c.energy = 50.0;
    c.run.t_f = 0.85;
    c.run.orders = {1, 2, 3, 4};
    c.run.windows = {WindowSpec::reflected(), WindowSpec::transmitted()};
  } else if (name == "fig2b") {
    c.energy = 0.0;
    c.run.t_f = 1.0;
    c.run.orders = {1, 2, 3, 4};
    // At 50 samples the spline error (~2e-5) hides the gain from N = 2 on.
    c.run.trajectories = 200;
  } else if (name == "fig3") {
    c.energy = 0.0;
    c.run.t_f.reset();
    c.run.orders = {1, 2, 3, 4};
    for (int k = 0; k <= 24; ++k) c.run.energies.push_back(2.5 * k);
  } else if (name == "free") {
    c.potential = PotentialModel::free();
    c.p_c = 30.0;
    c.run.t_f = 1.0;
    c.run.orders = {1};
    c.run.windows = {WindowSpec::interval(-1.0, 1.6)};
  } else {
    invalid("unknown preset '" + name + "'");
  }
  c.validate();
  return c;
}

nlohmann::json to_json(const ScenarioConfig& c) {
  using nlohmann::json;
  json potential;
  if (const auto* e = c.potential.as<EckartBarrier>())
    potential = {{"type", "eckart"}, {"height", e->height}, {"steepness", e->steepness}};
  else if (const auto* h = c.potential.as<HarmonicWell>())
    potential = {{"type", "harmonic"}, {"stiffness", h->stiffness}};
  else
    potential = {{"type", "free"}};

  json wavepacket = {{"alpha", c.alpha}, {"x_c", c.x_c}};
  if (c.p_c) wavepacket["p_c"] = *c.p_c;
  if (c.energy) wavepacket["energy"] = *c.energy;

  json windows = json::array();
  for (const auto& w : c.run.windows) {
    if (w.kind == WindowKind::Transmitted) {
      windows.push_back("transmitted");
    } else if (w.kind == WindowKind::Reflected) {
      windows.push_back("reflected");
    } else {
      json e = {{"x_lo", w.x_lo}, {"x_hi", w.x_hi}};
      if (w.seed) e["seed"] = *w.seed;
      windows.push_back(e);
    }
  }
  const auto& ic = c.run.integrator;
  const auto& mc = c.run.manifold;
  json run = {
      {"t_f", c.run.t_f ? json(*c.run.t_f) : json("auto")},
      {"orders", c.run.orders},
      {"trajectories", c.run.trajectories},
      {"march_step", c.run.march_step},
      {"windows", windows},
      {"energies", c.run.energies},
      {"paths", c.run.paths},
      {"path_samples", c.run.path_samples},
      {"integrator",
       {{"rel_tol", ic.rel_tol},
        {"abs_tol", ic.abs_tol},
        {"initial_step", ic.initial_step},
        {"max_step", ic.max_step},
        {"max_steps", ic.max_steps},
        {"blowup_threshold", ic.blowup_threshold}}},
      {"manifold",
       {{"landing_tolerance", mc.landing_tolerance},
        {"seed_window", mc.seed_window},
        {"newton_tolerance", mc.newton_tolerance},
        {"max_newton_iters", mc.max_newton_iters},
        {"max_newton_step", mc.max_newton_step},
        {"fd_step", mc.fd_step},
        {"max_recenter", mc.max_recenter},
        {"stall_threshold", mc.stall_threshold},
        {"max_gap_ratio", mc.max_gap_ratio}}},
  };
  const auto& o = c.oracle;
  json oracle = {{"dt", o.dt},
                 {"x_min", o.grid.x_min},
                 {"x_max", o.grid.x_max},
                 {"points", o.grid.n_points},
                 {"absorber", o.absorber},
                 {"flux_tolerance", o.flux_tolerance},
                 {"t_start", o.t_start},
                 {"t_step", o.t_step},
                 {"t_max", o.t_max}};
  if (c.run.grid)
    run["grid"] = {{"x_min", c.run.grid->x_min}, {"x_max", c.run.grid->x_max},
                   {"points", c.run.grid->points}};
  return json{{"name", c.name},
              {"system", {{"mass", c.mass}, {"hbar", c.hbar}, {"potential", potential}}},
              {"wavepacket", wavepacket},
              {"run", run},
              {"oracle", oracle},
              {"output", {{"directory", c.output.directory}, {"formats", c.output.formats}}}};
}

}  // namespace bomca
