#include <algorithm>
#include <cstdlib>

#include "advrain/cli.hpp"
#include "advrain/error.hpp"
#include "advrain/serialization.hpp"

namespace advrain::cli {

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
  std::filesystem::path p(value);
  return p.is_absolute() ? p : base / p;
}

}  // namespace

RunConfig load_run_config(const std::filesystem::path& path) {
  const nlohmann::json j = read_json_file(path);
  if (!j.is_object()) throw Error(ErrorCode::ConfigInvalid, "run config must be an object");
  for (const auto& [key, value] : j.items()) {
    if (key != "dataset_dir" && key != "output_dir" && key != "oracle" && key != "search") {
      throw Error(ErrorCode::ConfigInvalid, "unknown run config field '" + key + "'");
    }
  }
  for (const char* key : {"dataset_dir", "output_dir", "oracle", "search"}) {
    if (!j.contains(key)) {
      throw Error(ErrorCode::ConfigInvalid, std::string("missing '") + key + "'");
    }
  }
  if (!j["dataset_dir"].is_string() || !j["output_dir"].is_string()) {
    throw Error(ErrorCode::ConfigInvalid, "dataset_dir and output_dir must be strings");
  }

  const auto base = std::filesystem::absolute(path).parent_path();
  RunConfig config;
  config.dataset_dir = resolve(base, j["dataset_dir"].get<std::string>());
  config.output_dir = resolve(base, j["output_dir"].get<std::string>());

  nlohmann::json oracle = j["oracle"];
  if (const char* url = std::getenv("ADVRAIN_ORACLE_URL"); url != nullptr && *url != '\0') {
    if (oracle.is_object()) oracle.erase("synthetic");
    oracle["endpoint"] = url;
  }
  config.oracle = oracle_config_from_json(oracle);
  config.search = search_config_from_json(j["search"]);
  if (j["search"].contains("target_class")) config.only_class = config.search.target_class;

  std::error_code ec;
  if (!std::filesystem::is_directory(config.dataset_dir, ec)) {
    throw Error(ErrorCode::FileNotFound, "dataset_dir " + config.dataset_dir.string());
  }
  return config;
}

std::vector<ClassFolder> scan_dataset(const std::filesystem::path& dataset_dir) {
  const nlohmann::json index = read_json_file(dataset_dir / "labels.json");
  if (!index.is_object() || index.empty()) {
    throw Error(ErrorCode::ConfigInvalid, "labels.json must map directory names to labels");
  }
  std::vector<ClassFolder> folders;
  for (const auto& [name, value] : index.items()) {
    if (!value.is_number_integer() || value.get<int>() < 0) {
      throw Error(ErrorCode::ConfigInvalid, "label for '" + name + "' must be an integer >= 0");
    }
    ClassFolder folder{name, value.get<int>(), {}};
    const auto dir = dataset_dir / name;
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec)) {
      throw Error(ErrorCode::FileNotFound, "class directory " + dir.string());
    }
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".png") {
        folder.files.push_back(entry.path());
      }
    }
    std::sort(folder.files.begin(), folder.files.end());
    if (folder.files.empty()) {
      throw Error(ErrorCode::ConfigInvalid, "class directory " + dir.string() + " has no PNGs");
    }
    folders.push_back(std::move(folder));
  }
  std::sort(folders.begin(), folders.end(), [](const ClassFolder& a, const ClassFolder& b) {
    return a.label != b.label ? a.label < b.label : a.name < b.name;
  });
  return folders;
}

std::vector<ImageBuffer> load_images(const ClassFolder& folder) {
  std::vector<ImageBuffer> images;
  images.reserve(folder.files.size());
  for (const auto& file : folder.files) images.push_back(load_image(file));
  return images;
}

}  // namespace advrain::cli
