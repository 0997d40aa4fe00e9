#include "bomca/output.hpp"

#include <cstdio>
#include <fstream>

#include "bomca/error.hpp"

namespace bomca {

std::string_view version() { return BOMCA_VERSION; }

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path.string());
}

void write_sidecar(const std::filesystem::path& path, const ScenarioConfig& config,
                   const std::string& command, const nlohmann::json& extra) {
  const nlohmann::json meta = {{"file", path.filename().string()},
                               {"command", command},
                               {"version", version()},
                               {"config", to_json(config)},
                               {"details", extra}};
  write_file(path.string() + ".meta.json", meta.dump(2) + "\n");
}

void write_with_sidecar(const std::filesystem::path& path, const std::string& content,
                        const ScenarioConfig& config, const std::string& command,
                        const nlohmann::json& extra) {
  write_file(path, content);
  write_sidecar(path, config, command, extra);
}

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

}  // namespace bomca
