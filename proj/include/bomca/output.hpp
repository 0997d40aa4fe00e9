#pragma once

#include <filesystem>
#include <json.hpp>
#include <string>

#include "bomca/scenario.hpp"

namespace bomca {

std::string_view version();

/// Writes `content` to `path`, creating parent directories.
void write_file(const std::filesystem::path& path, const std::string& content);

/// `<path>.meta.json`: resolved config, code version, command and extras.
void write_sidecar(const std::filesystem::path& path, const ScenarioConfig& config,
                   const std::string& command, const nlohmann::json& extra = nlohmann::json::object());

/// Writes a data file and its sidecar.
void write_with_sidecar(const std::filesystem::path& path, const std::string& content,
                        const ScenarioConfig& config, const std::string& command,
                        const nlohmann::json& extra = nlohmann::json::object());

/// 17 significant digits, shortest exponent form.
std::string format_double(double value);

}  // namespace bomca
