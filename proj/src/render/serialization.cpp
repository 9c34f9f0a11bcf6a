#include "advrain/serialization.hpp"

#include <fstream>
#include <set>

#include "advrain/error.hpp"

namespace advrain {

namespace {

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& allowed,
                    const std::string& where) {
  if (!j.is_object()) throw Error(ErrorCode::ConfigInvalid, where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) {
      throw Error(ErrorCode::ConfigInvalid, "unknown field '" + key + "' in " + where);
    }
  }
  for (const auto& key : allowed) {
    if (!j.contains(key)) {
      throw Error(ErrorCode::ConfigInvalid, "missing field '" + key + "' in " + where);
    }
  }
}

double number(const nlohmann::json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number()) throw Error(ErrorCode::ConfigInvalid, std::string(key) + " must be a number");
  return v.get<double>();
}

int integer(const nlohmann::json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number_integer()) {
    throw Error(ErrorCode::ConfigInvalid, std::string(key) + " must be an integer");
  }
  return v.get<int>();
}

}  // namespace

nlohmann::json pattern_to_json(const RaindropPattern& pattern) {
  nlohmann::json drops = nlohmann::json::array();
  for (const Raindrop& d : pattern.drops) {
    drops.push_back({{"cx", d.cx}, {"cy", d.cy}, {"radius", d.radius}});
  }
  return {{"image_width", pattern.image_width},
          {"image_height", pattern.image_height},
          {"sigma_ratio", pattern.sigma_ratio},
          {"fisheye_strength", pattern.fisheye_strength},
          {"drops", std::move(drops)}};
}

RaindropPattern pattern_from_json(const nlohmann::json& j) {
  reject_unknown(j, {"image_width", "image_height", "sigma_ratio", "fisheye_strength", "drops"},
                 "pattern");
  RaindropPattern p;
  p.image_width = integer(j, "image_width");
  p.image_height = integer(j, "image_height");
  p.sigma_ratio = number(j, "sigma_ratio");
  p.fisheye_strength = number(j, "fisheye_strength");
  if (p.image_width < 1 || p.image_height < 1) {
    throw Error(ErrorCode::ConfigInvalid, "pattern image size must be >= 1");
  }
  if (!(p.sigma_ratio > 0.0)) throw Error(ErrorCode::ConfigInvalid, "sigma_ratio must be > 0");
  if (!(p.fisheye_strength >= 1.0)) {
    throw Error(ErrorCode::ConfigInvalid, "fisheye_strength must be >= 1");
  }
  const auto& drops = j.at("drops");
  if (!drops.is_array()) throw Error(ErrorCode::ConfigInvalid, "drops must be an array");
  for (const auto& d : drops) {
    reject_unknown(d, {"cx", "cy", "radius"}, "drop");
    Raindrop drop{number(d, "cx"), number(d, "cy"), number(d, "radius")};
    if (!(drop.radius > 0.0)) throw Error(ErrorCode::ConfigInvalid, "drop radius must be > 0");
    p.drops.push_back(drop);
  }
  return p;
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(ErrorCode::FileNotFound, path.string());
  }
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ConfigInvalid, path.string() + ": " + e.what());
  }
}

RaindropPattern load_pattern(const std::filesystem::path& path) {
  return pattern_from_json(read_json_file(path));
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    out << contents;
    if (!out) throw Error(ErrorCode::IoError, "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::IoError, "rename to " + path.string() + ": " + ec.message());
}

void write_json_atomic(const std::filesystem::path& path, const nlohmann::json& j) {
  write_file_atomic(path, j.dump(2) + "\n");
}

}  // namespace advrain
