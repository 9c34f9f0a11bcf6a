#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "advrain/render.hpp"

namespace advrain {

/// Pattern JSON: fixed field set, unknown fields rejected (ConfigInvalid).
nlohmann::json pattern_to_json(const RaindropPattern& pattern);
RaindropPattern pattern_from_json(const nlohmann::json& j);

RaindropPattern load_pattern(const std::filesystem::path& path);

/// Reads a whole JSON document; FileNotFound / ConfigInvalid on failure.
nlohmann::json read_json_file(const std::filesystem::path& path);

/// Writes via a sibling temp file and rename so readers never see partial output.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);
void write_json_atomic(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace advrain
