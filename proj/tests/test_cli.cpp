#include <doctest.h>

#include <cstdlib>
#include <map>

#include "advrain/cli.hpp"
#include "advrain/metrics.hpp"
#include "advrain/error.hpp"
#include "scenario.hpp"

namespace fs = std::filesystem;
using namespace advrain;

namespace {

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "advrain");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli::run(static_cast<int>(argv.size()), argv.data());
}

// Runs the real binary so stderr can be inspected.
int run_binary(const std::string& args, const fs::path& err) {
  const std::string cmd = std::string(ADVRAIN_CLI_PATH) + " " + args + " 2> " + err.string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

SearchConfig quick_search() {
  SearchConfig c;
  c.iterations = 3;
  c.candidates_per_iter = 4;
  c.drop_count = 3;
  c.drop_radius = 8.0;
  c.rng_seed = 5;
  return c;
}

std::vector<scenario::ClassSpec> two_classes() {
  std::vector<ImageBuffer> bright, dark;
  for (unsigned i = 0; i < 3; ++i) {
    bright.push_back(scenario::bright_square(0.55 + 0.05 * i, 0.02, i));
    ImageBuffer d = ImageBuffer::filled(64, 64, 1, 0.9f);
    for (int y = 20; y < 44; ++y) {
      for (int x = 20; x < 44; ++x) d.at(x, y) = 0.3f + 0.05f * static_cast<float>(i);
    }
    dark.push_back(d);
  }
  return {{"bright", 1, bright}, {"dark", 0, dark}};
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) files[e.path().string()] = scenario::slurp(e.path());
  }
  return files;
}

fs::path workspace(const std::string& name) {
  return fs::temp_directory_path() / ("advrain_cli_" + name);
}

}  // namespace

TEST_CASE("attack writes artifacts and reruns byte-identically") {
  const auto root = workspace("attack");
  const auto config = scenario::write_workspace(root, two_classes(), quick_search());
  const auto before = snapshot(root / "data");
  REQUIRE(run({"attack", "--config", config.string()}) == cli::kExitOk);
  for (const char* cls : {"bright", "dark"}) {
    CHECK(fs::exists(root / "out" / cls / "pattern.json"));
    CHECK(fs::exists(root / "out" / cls / "result.json"));
  }
  const auto pattern = scenario::slurp(root / "out/bright/pattern.json");
  const auto result = scenario::slurp(root / "out/bright/result.json");
  REQUIRE(run({"attack", "--config", config.string()}) == cli::kExitOk);
  CHECK(scenario::slurp(root / "out/bright/pattern.json") == pattern);
  CHECK(scenario::slurp(root / "out/bright/result.json") == result);
  const auto j = nlohmann::json::parse(result);
  CHECK(j.at("evaluations_used") == 12);
  CHECK(j.at("config").at("target_class") == 1);
  CHECK(snapshot(root / "data") == before);

  // --seed overrides the config seed.
  REQUIRE(run({"attack", "--config", config.string(), "--seed", "99"}) == cli::kExitOk);
  CHECK(nlohmann::json::parse(scenario::slurp(root / "out/bright/result.json"))
            .at("config")
            .at("rng_seed") == 99);
  fs::remove_all(root);
}

TEST_CASE("pinned target class limits the attack") {
  auto search = quick_search();
  search.target_class = 0;
  const auto root = workspace("pinned");
  const auto config = scenario::write_workspace(root, two_classes(), search, true);
  REQUIRE(run({"attack", "--config", config.string()}) == cli::kExitOk);
  CHECK(fs::exists(root / "out/dark/pattern.json"));
  CHECK_FALSE(fs::exists(root / "out/bright"));
  fs::remove_all(root);
}

TEST_CASE("config errors exit with 2") {
  const auto root = workspace("errors");
  const auto config = scenario::write_workspace(root, two_classes(), quick_search());
  auto j = read_json_file(config);

  j["dataset_dir"] = "missing";
  write_json_atomic(root / "missing.json", j);
  CHECK(run({"attack", "--config", (root / "missing.json").string()}) == cli::kExitConfig);

  j = read_json_file(config);
  j["surprise"] = true;
  write_json_atomic(root / "unknown.json", j);
  CHECK(run({"attack", "--config", (root / "unknown.json").string()}) == cli::kExitConfig);

  j = read_json_file(config);
  j["search"]["iterations"] = 0;
  write_json_atomic(root / "zero.json", j);
  CHECK(run({"baseline", "--config", (root / "zero.json").string()}) == cli::kExitConfig);

  CHECK(run({"attack", "--config", (root / "nope.json").string()}) == cli::kExitConfig);
  CHECK(run({"attack"}) == cli::kExitConfig);
  CHECK(run({"sweep", "--config", config.string(), "--drops", "-1", "--radii", "4"}) ==
        cli::kExitConfig);
  fs::remove_all(root);
}

TEST_CASE("oracle failures exit with 3") {
  const auto root = workspace("oracle");
  const auto config = scenario::write_workspace(root, two_classes(), quick_search());
  auto j = read_json_file(config);
  j["oracle"] = {{"endpoint", "http://127.0.0.1:9"}, {"timeout_ms", 300}};
  write_json_atomic(root / "remote.json", j);
  CHECK(run({"attack", "--config", (root / "remote.json").string()}) == cli::kExitOracle);
  fs::remove_all(root);
}

TEST_CASE("render: identity, determinism, mismatch message") {
  const auto root = workspace("render");
  fs::create_directories(root);
  const ImageBuffer img = scenario::bright_square(0.6, 0.1, 3);
  save_image(img, root / "in.png");
  RaindropPattern empty;
  empty.image_width = empty.image_height = 64;
  write_json_atomic(root / "empty.json", pattern_to_json(empty));
  REQUIRE(run({"render", "--pattern", (root / "empty.json").string(), "--image",
               (root / "in.png").string(), "--out", (root / "out.png").string()}) == 0);
  CHECK(load_image(root / "out.png") == load_image(root / "in.png"));

  RaindropPattern drops = empty;
  drops.drops = {{20, 30, 6}, {40, 12, 4}};
  write_json_atomic(root / "drops.json", pattern_to_json(drops));
  for (const char* out : {"a.png", "b.png"}) {
    REQUIRE(run({"render", "--pattern", (root / "drops.json").string(), "--image",
                 (root / "in.png").string(), "--out", (root / out).string()}) == 0);
  }
  CHECK(scenario::slurp(root / "a.png") == scenario::slurp(root / "b.png"));

  save_image(ImageBuffer(32, 48, 1), root / "small.png");
  const int code = run_binary("render --pattern " + (root / "drops.json").string() + " --image " +
                                  (root / "small.png").string() + " --out " +
                                  (root / "c.png").string(),
                              root / "err.txt");
  CHECK(code == cli::kExitConfig);
  const auto err = scenario::slurp(root / "err.txt");
  CHECK(err.find("64x64") != std::string::npos);
  CHECK(err.find("32x48") != std::string::npos);
  CHECK_FALSE(fs::exists(root / "c.png"));
  fs::remove_all(root);
}

TEST_CASE("eval report and baseline artifacts") {
  const auto root = workspace("eval");
  const auto config = scenario::write_workspace(root, two_classes(), quick_search());
  RaindropPattern empty;
  empty.image_width = empty.image_height = 64;
  write_json_atomic(root / "empty.json", pattern_to_json(empty));
  REQUIRE(run({"eval", "--pattern", (root / "empty.json").string(), "--config",
               config.string()}) == 0);
  const auto report = read_json_file(root / "out/eval.json");
  CHECK(report.at("total") == 6);
  CHECK(report.at("clean_accuracy") == 1.0);
  CHECK(report.at("overall_accuracy") == 1.0);
  CHECK(report.at("mean_ssim") == 1.0);

  REQUIRE(run({"attack", "--config", config.string()}) == 0);
  REQUIRE(run({"baseline", "--config", config.string()}) == 0);
  CHECK(fs::exists(root / "out/bright/baseline/result.json"));
  CHECK(fs::exists(root / "out/dark/baseline/pattern.json"));
  CHECK(fs::exists(root / "out/bright/result.json"));
  fs::remove_all(root);
}

TEST_CASE("sweep rows and the degenerate grid") {
  const auto root = workspace("sweep");
  auto classes = two_classes();
  const auto config = scenario::write_workspace(root, classes, quick_search());
  REQUIRE(run({"sweep", "--config", config.string(), "--drops", "0,2,4", "--radii", "4,8"}) == 0);
  const auto csv = scenario::slurp(root / "out/sweep.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 6);
  CHECK(csv.rfind("n_drops,radius,clean_acc,adv_acc,asr,mean_ssim\n0,4,", 0) == 0);

  // One class, one cell: sweep must reproduce attack followed by eval.
  classes.pop_back();
  auto search = quick_search();
  search.drop_count = 4;
  search.drop_radius = 10.0;
  const auto single = scenario::write_workspace(root, classes, search);
  REQUIRE(run({"attack", "--config", single.string()}) == 0);
  REQUIRE(run({"eval", "--pattern", (root / "out/bright/pattern.json").string(), "--config",
               single.string()}) == 0);
  REQUIRE(run({"sweep", "--config", single.string(), "--drops", "4", "--radii", "10"}) == 0);
  const auto r = read_json_file(root / "out/eval.json");
  SweepRow row{4, 10.0, r.at("clean_accuracy"), r.at("overall_accuracy"),
               r.at("attack_success_rate"), r.at("mean_ssim")};
  CHECK(scenario::slurp(root / "out/sweep.csv") == sweep_csv(std::span(&row, 1)));
  fs::remove_all(root);
}
