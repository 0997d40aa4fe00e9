#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <string>

#include "bomca/error.hpp"
#include "bomca/experiments.hpp"
#include "bomca/output.hpp"
#include "bomca/scenario.hpp"

namespace {

struct Options {
  std::string config;
  std::string preset;
  std::string out;
  int threads = 0;
  std::string format;
};

int default_threads() {
  if (const char* env = std::getenv("BOMCA_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
    std::cerr << "ignoring invalid BOMCA_THREADS='" << env << "'\n";
  }
  return 1;
}

bomca::ScenarioConfig resolve(const Options& o, const std::string& fallback_preset) {
  if (!o.config.empty() && !o.preset.empty())
    throw bomca::Error(bomca::ErrorKind::InvalidConfig, "give either --config or --preset");
  bomca::ScenarioConfig c = !o.config.empty()  ? bomca::load_config(o.config)
                            : !o.preset.empty() ? bomca::preset(o.preset)
                                                : bomca::preset(fallback_preset);
  if (!o.out.empty()) c.output.directory = o.out;
  if (!o.format.empty()) c.output.formats = {o.format};
  c.validate();
  return c;
}

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "Scenario file (YAML)");
  cmd->add_option("--preset", o.preset, "Built-in scenario: fig1, fig2a, fig2b, fig3, free");
  cmd->add_option("--out", o.out, "Output directory (overrides the config)");
  cmd->add_option("--threads", o.threads, "Worker threads (default: BOMCA_THREADS or 1)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
}

template <class Report>
int finish(const Report& report) {
  for (const auto& f : report.files) std::cout << "wrote " << f.string() << '\n';
  for (const auto& f : report.failures) std::cerr << "failed " << f.item << ": " << f.error << '\n';
  return report.failures.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Complex-action quantum trajectory engine"};
  app.set_version_flag("--version", std::string(bomca::version()));
  app.require_subcommand(1);

  Options o;
  auto* trajectories = app.add_subcommand("trajectories", "Marched manifold and dense complex paths");
  auto* wavefunction = app.add_subcommand("wavefunction", "Reconstructed vs split-operator wavefunction per N");
  auto* transmission = app.add_subcommand("transmission", "Transmission probability sweep over energy");
  auto* oracle = app.add_subcommand("oracle", "Split-operator reference wavefunction and transmission");
  auto* selftest = app.add_subcommand("selftest", "Quick internal consistency checks");
  for (auto* cmd : {trajectories, wavefunction, transmission, oracle}) add_common(cmd, o);

  CLI11_PARSE(app, argc, argv);

  try {
    if (selftest->parsed()) return bomca::run_selftest(std::cout) == 0 ? 0 : 1;

    const std::string fallback = transmission->parsed() ? "fig3" : trajectories->parsed() ? "fig1" : "fig2b";
    const bomca::ScenarioConfig config = resolve(o, fallback);
    bomca::RunContext ctx{config.output.directory, o.threads > 0 ? o.threads : default_threads(),
                          &std::cerr};
    if (trajectories->parsed()) return finish(bomca::run_trajectories(config, ctx));
    if (wavefunction->parsed()) return finish(bomca::run_wavefunction(config, ctx));
    if (transmission->parsed()) return finish(bomca::run_transmission(config, ctx));
    if (oracle->parsed()) return finish(bomca::run_oracle(config, ctx));
  } catch (const bomca::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
