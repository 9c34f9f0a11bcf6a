#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "advrain/image.hpp"
#include "advrain/optimizer.hpp"
#include "advrain/oracle.hpp"

namespace advrain::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitOracle = 3;

struct RunConfig {
  std::filesystem::path dataset_dir;
  std::filesystem::path output_dir;
  OracleConfig oracle;
  SearchConfig search;
  /// Set when the config pins search.target_class; otherwise every class is attacked.
  std::optional<int> only_class;
};

/// Relative paths resolve against the config file's directory.
/// ADVRAIN_ORACLE_URL, when set, replaces the oracle with a remote endpoint.
RunConfig load_run_config(const std::filesystem::path& path);

struct ClassFolder {
  std::string name;
  int label = 0;
  std::vector<std::filesystem::path> files;
};

/// Per-class subdirectories of PNGs, indexed by labels.json ({"dir": label}).
std::vector<ClassFolder> scan_dataset(const std::filesystem::path& dataset_dir);
std::vector<ImageBuffer> load_images(const ClassFolder& folder);

/// Entry point shared by the advrain binary and the tests.
int run(int argc, const char* const* argv);

}  // namespace advrain::cli
