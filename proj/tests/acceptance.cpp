// Acceptance suite: one PASS/FAIL line per criterion, each within its budget.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>

#include "advrain/cli.hpp"
#include "advrain/metrics.hpp"
#include "advrain/render.hpp"
#include "scenario.hpp"

namespace fs = std::filesystem;
using namespace advrain;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

ImageBuffer random_image(int w, int h, int c, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  ImageBuffer img(w, h, c);
  for (float& v : img.data()) v = u(gen);
  return img;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome identity() {
  for (unsigned seed = 0; seed < 10; ++seed) {
    const ImageBuffer img = random_image(40 + seed, 30, seed % 2 ? 3 : 1, seed);
    RaindropPattern p;
    p.image_width = img.width();
    p.image_height = img.height();
    const ImageBuffer out = render(img, p);
    if (!(out == img)) return {false, fmt("seed %u: render changed pixels", seed)};
    if (ssim(img, out) != 1.0) return {false, fmt("seed %u: ssim %.17g", seed, ssim(img, out))};
  }
  return {true, "10 images bitwise unchanged, ssim == 1.0"};
}

Outcome blur_oracle() {
  double worst = 0.0;
  for (unsigned seed = 0; seed < 25; ++seed) {
    const ImageBuffer img = random_image(16, 16, 1, 1000 + seed);
    const GaussianKernel k = gaussian_kernel(0.5 + 0.5 * (seed % 6));
    const DropMask full{16, 16, std::vector<float>(256, 1.0f)};
    const ImageBuffer out = blur_region(img, full, k);
    for (int y = 0; y < 16; ++y) {
      for (int x = 0; x < 16; ++x) {
        double acc = 0.0;
        for (int b = -k.half_width(); b <= k.half_width(); ++b) {
          for (int a = -k.half_width(); a <= k.half_width(); ++a) {
            const int sx = std::clamp(x + a, 0, 15), sy = std::clamp(y + b, 0, 15);
            acc += k.weight(a, b) * img.at(sx, sy);
          }
        }
        worst = std::max(worst, std::abs(acc - out.at(x, y)));
      }
    }
  }
  return {worst <= 1e-5, fmt("max |diff| = %.3g over 25 images", worst)};
}

Outcome kernel_sum() {
  double worst = 0.0;
  for (double sigma : {0.5, 1.0, 2.0, 5.0, 10.0}) {
    const GaussianKernel k = gaussian_kernel(sigma);
    const auto& w = k.weights();
    worst = std::max(worst, std::abs(std::accumulate(w.begin(), w.end(), 0.0) - 1.0));
  }
  return {worst <= 1e-9, fmt("max |sum - 1| = %.3g", worst)};
}

Outcome fisheye() {
  const ImageBuffer img = random_image(64, 64, 3, 7);
  const Raindrop drop{32, 32, 10};
  if (!(fisheye_warp(img, drop, 1.0) == img)) return {false, "k=1 changed pixels"};
  ImageBuffer ramp(64, 64, 3);
  for (int y = 0; y < 64; ++y) {
    for (int x = 0; x < 64; ++x) {
      ramp.at(x, y, 0) = static_cast<float>(x / 63.0);
      ramp.at(x, y, 1) = static_cast<float>(y / 63.0);
    }
  }
  const double lens = 1.1 * 1.4 * drop.radius;
  double rim = 0.0;
  for (double k : {1.5, 2.0, 3.0}) {
    const ImageBuffer out = fisheye_warp(ramp, drop, k);
    if (out.at(32, 32, 0) != ramp.at(32, 32, 0) || out.at(32, 32, 1) != ramp.at(32, 32, 1)) {
      return {false, fmt("k=%g moved the center", k)};
    }
    for (int y = 0; y < 64; ++y) {
      for (int x = 0; x < 64; ++x) {
        if (std::abs(std::hypot(x - drop.cx, y - drop.cy) - lens) > 0.5) continue;
        rim = std::max(rim, std::hypot(out.at(x, y, 0) * 63.0 - x, out.at(x, y, 1) * 63.0 - y));
      }
    }
  }
  return {rim <= 1.0, fmt("identity at k=1, center fixed, max rim displacement %.3f px", rim)};
}

Outcome merge() {
  std::mt19937 gen(17);
  std::uniform_real_distribution<double> pos(0, 64), rad(1, 10);
  for (int t = 0; t < 100; ++t) {
    std::vector<Raindrop> drops(1 + t % 15);
    for (auto& d : drops) d = {pos(gen), pos(gen), rad(gen)};
    const auto once = merge_collisions(drops);
    if (merge_collisions(once) != once) return {false, fmt("set %d not idempotent", t)};
  }
  const auto pair = merge_collisions({{5, 5, 3}, {5, 5, 4}});
  const bool ok = pair.size() == 1 && std::abs(pair[0].radius - 5.0) < 1e-12;
  return {ok, ok ? "100 sets idempotent; (3,4) coincident -> r=5"
                 : fmt("coincident pair gave %zu drops", pair.size())};
}

std::vector<AttackResult> attack_runs(bool guided) {
  const auto oracle = scenario::oracle();
  const auto images = scenario::attack_corpus();
  const std::vector<int> labels(images.size(), 1);
  std::vector<AttackResult> runs;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const SearchConfig c = scenario::attack_config(seed);
    runs.push_back(guided ? random_search(images, labels, oracle, c)
                          : random_baseline(images, labels, oracle, c));
  }
  return runs;
}

Outcome synthetic_attack() {
  int perfect = 0;
  for (const auto& r : attack_runs(true)) perfect += r.best_score.misclassification == 1.0;
  return {perfect >= 29, fmt("%d/30 seeds reach misclassification 1.0 (need >= 95%%)", perfect)};
}

Outcome guided_vs_random() {
  double guided = 0.0, baseline = 0.0;
  for (const auto& r : attack_runs(true)) guided += r.best_score.misclassification / 30.0;
  for (const auto& r : attack_runs(false)) baseline += r.best_score.misclassification / 30.0;
  return {guided - baseline >= 0.2,
          fmt("mean objective guided %.3f vs baseline %.3f, gap %.3f (need >= 0.2)", guided,
              baseline, guided - baseline)};
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "advrain");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli::run(static_cast<int>(argv.size()), argv.data());
}

struct Row {
  int n;
  double r, adv, ssim;
};

std::vector<Row> read_sweep(const fs::path& csv) {
  std::istringstream in(scenario::slurp(csv));
  std::string line;
  std::getline(in, line);
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    Row row{};
    double clean = 0, asr = 0;
    std::sscanf(line.c_str(), "%d,%lf,%lf,%lf,%lf,%lf", &row.n, &row.r, &clean, &row.adv, &asr,
                &row.ssim);
    rows.push_back(row);
  }
  return rows;
}

// Twelve class-1 bright squares at graded levels plus six class-0 dark
// squares on a bright field.
std::vector<scenario::ClassSpec> trend_corpus() {
  std::vector<ImageBuffer> bright, dark;
  for (unsigned i = 0; i < 12; ++i) bright.push_back(scenario::bright_square(0.52 + 0.03 * i, 0.02, i));
  for (unsigned i = 0; i < 6; ++i) {
    ImageBuffer d = ImageBuffer::filled(64, 64, 1, 1.0f);
    const ImageBuffer sq = scenario::bright_square(0.46 - 0.05 * i, 0.02, 50 + i);
    for (int y = 16; y < 48; ++y) {
      for (int x = 16; x < 48; ++x) d.at(x, y) = sq.at(x, y);
    }
    dark.push_back(d);
  }
  return {{"bright", 1, bright}, {"dark", 0, dark}};
}

Outcome trends() {
  SearchConfig search;
  search.iterations = 5;
  search.candidates_per_iter = 8;
  search.rng_seed = 2024;
  const auto root = fs::temp_directory_path() / "advrain_acceptance_trends";
  const auto config = scenario::write_workspace(root, trend_corpus(), search);
  const auto by_n = root / "by_n.csv", by_r = root / "by_r.csv";
  if (cli({"sweep", "--config", config.string(), "--drops", "0,5,10,20", "--radii", "8", "--out",
           by_n.string()}) != 0 ||
      cli({"sweep", "--config", config.string(), "--drops", "10", "--radii", "4,8,12", "--out",
           by_r.string()}) != 0) {
    return {false, "sweep command failed"};
  }
  const auto n_rows = read_sweep(by_n), r_rows = read_sweep(by_r);
  fs::remove_all(root);
  bool ok = n_rows.size() == 4 && r_rows.size() == 3;
  std::string detail = "adv_acc by n:";
  for (std::size_t i = 0; i < n_rows.size(); ++i) {
    detail += fmt(" %.3f", n_rows[i].adv);
    if (i > 0) ok = ok && n_rows[i].adv <= n_rows[i - 1].adv && n_rows[i].ssim < n_rows[i - 1].ssim;
  }
  detail += "; ssim by n:";
  for (const auto& row : n_rows) detail += fmt(" %.4f", row.ssim);
  detail += "; adv_acc by r:";
  for (std::size_t i = 0; i < r_rows.size(); ++i) {
    detail += fmt(" %.3f", r_rows[i].adv);
    if (i > 0) ok = ok && r_rows[i].adv <= r_rows[i - 1].adv;
  }
  return {ok, detail};
}

Outcome reproducibility() {
  auto search = scenario::attack_config(11);
  search.iterations = 4;
  const auto root = fs::temp_directory_path() / "advrain_acceptance_repro";
  const auto config =
      scenario::write_workspace(root, {{"target", 1, scenario::attack_corpus()}}, search);
  std::string first[2];
  for (int pass = 0; pass < 2; ++pass) {
    if (cli({"attack", "--config", config.string()}) != 0) return {false, "attack failed"};
    const std::string both = scenario::slurp(root / "out/target/pattern.json") + '\0' +
                             scenario::slurp(root / "out/target/result.json");
    if (pass == 0) {
      first[0] = both;
      fs::remove_all(root / "out");
    } else {
      first[1] = both;
    }
  }
  fs::remove_all(root);
  const bool same = first[0] == first[1] && first[0].size() > 2;
  return {same, same ? "pattern.json and result.json byte-identical across runs"
                     : "outputs differ between runs"};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget_s;
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria{
      {"identity render", 1.0, identity},
      {"blur oracle equivalence", 5.0, blur_oracle},
      {"kernel normalization", 1.0, kernel_sum},
      {"fisheye contracts", 1.0, fisheye},
      {"merge fixed point", 1.0, merge},
      {"synthetic attack success", 60.0, synthetic_attack},
      {"guided beats random", 120.0, guided_vs_random},
      {"monotone trends", 120.0, trends},
      {"reproducibility", 60.0, reproducibility},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& c = criteria[i];
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o{false, ""};
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = o.pass && secs <= c.budget_s;
    failed += !pass;
    std::printf("%s [%zu] %s: %s (%.2fs, budget %.0fs)\n", pass ? "PASS" : "FAIL", i + 1, c.name,
                o.detail.c_str(), secs, c.budget_s);
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
