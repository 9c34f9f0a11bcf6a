#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>

#include "advrain/cli.hpp"
#include "advrain/error.hpp"
#include "advrain/metrics.hpp"
#include "advrain/serialization.hpp"

namespace advrain::cli {

namespace {

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::OracleUnreachable:
    case ErrorCode::ProtocolError:
    case ErrorCode::ShapeMismatch:
      return kExitOracle;
    case ErrorCode::IoError:
      return kExitIo;
    default:
      return kExitConfig;
  }
}

struct Dataset {
  std::vector<ClassFolder> folders;
  std::vector<std::vector<ImageBuffer>> images;  // parallel to folders
};

Dataset load_dataset(const RunConfig& config) {
  Dataset d;
  d.folders = scan_dataset(config.dataset_dir);
  for (const auto& folder : d.folders) d.images.push_back(load_images(folder));
  return d;
}

/// Indices into Dataset::folders selected for attack.
std::vector<std::size_t> attack_targets(const RunConfig& config, const Dataset& data) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < data.folders.size(); ++i) {
    if (!config.only_class || data.folders[i].label == *config.only_class) out.push_back(i);
  }
  if (out.empty()) throw Error(ErrorCode::ConfigInvalid, "no class matches target_class");
  return out;
}

SearchConfig search_for(const RunConfig& config, int label) {
  SearchConfig s = config.search;
  s.target_class = label;
  return s;
}

std::filesystem::path class_dir(const RunConfig& config, const ClassFolder& folder) {
  auto dir = config.output_dir / folder.name;
  std::filesystem::create_directories(dir);
  return dir;
}

void apply_seed(RunConfig& config, const std::optional<std::uint64_t>& seed) {
  if (seed) config.search.rng_seed = *seed;
}

int cmd_attack(const std::filesystem::path& config_path, std::optional<std::uint64_t> seed) {
  RunConfig config = load_run_config(config_path);
  apply_seed(config, seed);
  const auto oracle = make_oracle(config.oracle);
  const Dataset data = load_dataset(config);
  for (std::size_t i : attack_targets(config, data)) {
    const auto& folder = data.folders[i];
    const std::vector<int> labels(data.images[i].size(), folder.label);
    const AttackResult result =
        random_search(data.images[i], labels, *oracle, search_for(config, folder.label));
    const auto dir = class_dir(config, folder);
    write_json_atomic(dir / "pattern.json", pattern_to_json(result.best_pattern));
    write_json_atomic(dir / "result.json", attack_result_to_json(result));
    std::printf("attack %s: clean_acc=%.4f adv_acc=%.4f drops=%zu\n", folder.name.c_str(),
                result.clean_accuracy, result.adversarial_accuracy,
                result.best_pattern.drops.size());
  }
  return kExitOk;
}

int cmd_baseline(const std::filesystem::path& config_path, std::optional<std::uint64_t> seed) {
  RunConfig config = load_run_config(config_path);
  apply_seed(config, seed);
  const auto oracle = make_oracle(config.oracle);
  const Dataset data = load_dataset(config);
  for (std::size_t i : attack_targets(config, data)) {
    const auto& folder = data.folders[i];
    const std::vector<int> labels(data.images[i].size(), folder.label);
    const AttackResult result =
        random_baseline(data.images[i], labels, *oracle, search_for(config, folder.label));
    const auto dir = class_dir(config, folder) / "baseline";
    std::filesystem::create_directories(dir);
    write_json_atomic(dir / "pattern.json", pattern_to_json(result.best_pattern));
    write_json_atomic(dir / "result.json", attack_result_to_json(result));

    std::string guided = "n/a";
    const auto guided_path = config.output_dir / folder.name / "result.json";
    if (std::filesystem::exists(guided_path)) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.4f",
                    read_json_file(guided_path).at("adversarial_accuracy").get<double>());
      guided = buf;
    }
    std::printf("baseline %s: clean_acc=%.4f adv_acc=%.4f guided_adv_acc=%s\n",
                folder.name.c_str(), result.clean_accuracy, result.adversarial_accuracy,
                guided.c_str());
  }
  return kExitOk;
}

int cmd_render(const std::filesystem::path& pattern_path, const std::filesystem::path& image_path,
               const std::filesystem::path& out_path) {
  const RaindropPattern pattern = load_pattern(pattern_path);
  const ImageBuffer image = load_image(image_path);
  const ImageBuffer rendered = render(image, pattern);
  const auto bytes = encode_png(rendered);
  write_file_atomic(out_path, std::string(bytes.begin(), bytes.end()));
  return kExitOk;
}

int cmd_eval(const std::filesystem::path& pattern_path, const std::filesystem::path& config_path,
             const std::optional<std::filesystem::path>& out_path) {
  const RunConfig config = load_run_config(config_path);
  const RaindropPattern pattern = load_pattern(pattern_path);
  const auto oracle = make_oracle(config.oracle);
  const Dataset data = load_dataset(config);
  std::vector<ImageBuffer> images;
  std::vector<int> labels;
  for (std::size_t i = 0; i < data.folders.size(); ++i) {
    for (const auto& img : data.images[i]) {
      images.push_back(img);
      labels.push_back(data.folders[i].label);
    }
  }
  const EvalReport report = evaluate(images, labels, pattern, *oracle);
  std::filesystem::create_directories(config.output_dir);
  write_json_atomic(out_path.value_or(config.output_dir / "eval.json"),
                    eval_report_to_json(report));
  std::printf("eval: images=%d clean_acc=%.4f adv_acc=%.4f asr=%.4f mean_ssim=%.4f\n",
              report.total, report.clean_accuracy, report.overall_accuracy,
              report.attack_success_rate, report.mean_ssim);
  return kExitOk;
}

int cmd_sweep(const std::filesystem::path& config_path, const std::vector<int>& drops,
              const std::vector<double>& radii, std::optional<std::uint64_t> seed,
              const std::optional<std::filesystem::path>& out_path) {
  RunConfig config = load_run_config(config_path);
  apply_seed(config, seed);
  for (int n : drops) {
    if (n < 0) throw Error(ErrorCode::ConfigInvalid, "drop counts must be >= 0");
  }
  for (double r : radii) {
    if (!(r > 0.0)) throw Error(ErrorCode::ConfigInvalid, "radii must be > 0");
  }
  const auto oracle = make_oracle(config.oracle);
  const Dataset data = load_dataset(config);
  const auto targets = attack_targets(config, data);

  std::vector<SweepRow> rows;
  for (int n : drops) {
    for (double r : radii) {
      std::vector<int> labels, clean_top1, adv_top1;
      std::vector<double> similarity;
      for (std::size_t i : targets) {
        const auto& folder = data.folders[i];
        const auto& images = data.images[i];
        const std::vector<int> class_labels(images.size(), folder.label);
        SearchConfig search = search_for(config, folder.label);
        search.drop_radius = r;
        RaindropPattern pattern;
        pattern.sigma_ratio = search.sigma_ratio;
        pattern.fisheye_strength = search.fisheye_strength;
        pattern.image_width = images.front().width();
        pattern.image_height = images.front().height();
        if (n > 0) {
          search.drop_count = n;
          pattern = random_search(images, class_labels, *oracle, search).best_pattern;
        }
        // Tallied per image so one row pools every attacked class.
        const auto clean = oracle->classify(images);
        std::vector<ImageBuffer> rendered;
        for (const auto& img : images) rendered.push_back(render(img, pattern));
        const auto adv = oracle->classify(rendered);
        for (std::size_t k = 0; k < images.size(); ++k) {
          labels.push_back(folder.label);
          clean_top1.push_back(clean[k].top1);
          adv_top1.push_back(adv[k].top1);
          similarity.push_back(ssim(images[k], rendered[k]));
        }
      }
      const EvalReport cell = tally(labels, clean_top1, adv_top1, similarity);
      rows.push_back({n, r, cell.clean_accuracy, cell.overall_accuracy, cell.attack_success_rate,
                      cell.mean_ssim});
      std::printf("sweep n=%d r=%g: adv_acc=%.4f mean_ssim=%.4f\n", n, r, cell.overall_accuracy,
                  cell.mean_ssim);
    }
  }
  std::filesystem::create_directories(config.output_dir);
  write_file_atomic(out_path.value_or(config.output_dir / "sweep.csv"), sweep_csv(rows));
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Raindrop adversarial perturbation toolkit", "advrain"};
  app.require_subcommand(1);

  std::string config_path, pattern_path, image_path, out_path;
  std::optional<std::uint64_t> seed;
  std::vector<int> drops;
  std::vector<double> radii;

  auto* attack = app.add_subcommand("attack", "Search a universal pattern per target class");
  attack->add_option("--config", config_path, "Run config JSON")->required();
  attack->add_option("--seed", seed, "Override search.rng_seed");

  auto* baseline = app.add_subcommand("baseline", "Random placement over the whole image");
  baseline->add_option("--config", config_path, "Run config JSON")->required();
  baseline->add_option("--seed", seed, "Override search.rng_seed");

  auto* render_cmd = app.add_subcommand("render", "Apply a pattern to one PNG");
  render_cmd->add_option("--pattern", pattern_path, "Pattern JSON")->required();
  render_cmd->add_option("--image", image_path, "Input PNG")->required();
  render_cmd->add_option("--out", out_path, "Output PNG")->required();

  auto* eval = app.add_subcommand("eval", "Evaluate a pattern on the dataset");
  eval->add_option("--pattern", pattern_path, "Pattern JSON")->required();
  eval->add_option("--config", config_path, "Run config JSON")->required();
  eval->add_option("--out", out_path, "Report path (default <output_dir>/eval.json)");

  auto* sweep = app.add_subcommand("sweep", "Attack and evaluate over a drops x radii grid");
  sweep->add_option("--config", config_path, "Run config JSON")->required();
  sweep->add_option("--drops", drops, "Drop counts")->delimiter(',')->required();
  sweep->add_option("--radii", radii, "Drop radii in pixels")->delimiter(',')->required();
  sweep->add_option("--seed", seed, "Override search.rng_seed");
  sweep->add_option("--out", out_path, "CSV path (default <output_dir>/sweep.csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  const auto out = out_path.empty() ? std::nullopt
                                    : std::optional<std::filesystem::path>(out_path);
  try {
    if (*attack) return cmd_attack(config_path, seed);
    if (*baseline) return cmd_baseline(config_path, seed);
    if (*render_cmd) return cmd_render(pattern_path, image_path, out_path);
    if (*eval) return cmd_eval(pattern_path, config_path, out);
    if (*sweep) return cmd_sweep(config_path, drops, radii, seed, out);
  } catch (const Error& e) {
    std::cerr << "advrain: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "advrain: " << e.what() << '\n';
    return kExitIo;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "advrain: malformed JSON: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace advrain::cli
