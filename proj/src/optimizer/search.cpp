#include <algorithm>
#include <cmath>

#include "advrain/error.hpp"
#include "advrain/optimizer.hpp"
#include "advrain/serialization.hpp"
#include "parallel.hpp"

namespace advrain {

void SearchConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::ConfigInvalid, what); };
  if (iterations < 1) fail("iterations must be >= 1");
  if (candidates_per_iter < 1) fail("candidates_per_iter must be >= 1");
  if (drop_count < 1) fail("drop_count must be >= 1");
  if (!(drop_radius > 0.0)) fail("drop_radius must be > 0");
  if (!(sigma_ratio > 0.0)) fail("sigma_ratio must be > 0");
  if (!(fisheye_strength >= 1.0)) fail("fisheye_strength must be >= 1");
  if (!(saliency_quantile > 0.0 && saliency_quantile <= 1.0)) {
    fail("saliency_quantile must lie in (0, 1]");
  }
  if (target_class < 0) fail("target_class must be >= 0");
}

SearchConfig search_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::ConfigInvalid, "search must be an object");
  SearchConfig c;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "iterations") c.iterations = value.get<int>();
      else if (key == "candidates_per_iter") c.candidates_per_iter = value.get<int>();
      else if (key == "drop_count") c.drop_count = value.get<int>();
      else if (key == "drop_radius") c.drop_radius = value.get<double>();
      else if (key == "sigma_ratio") c.sigma_ratio = value.get<double>();
      else if (key == "fisheye_strength") c.fisheye_strength = value.get<double>();
      else if (key == "saliency_quantile") c.saliency_quantile = value.get<double>();
      else if (key == "rng_seed") c.rng_seed = value.get<std::uint64_t>();
      else if (key == "target_class") c.target_class = value.get<int>();
      else throw Error(ErrorCode::ConfigInvalid, "unknown search field '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigInvalid, std::string("search config: ") + e.what());
  }
  c.validate();
  return c;
}

nlohmann::json search_config_to_json(const SearchConfig& c) {
  return {{"iterations", c.iterations},
          {"candidates_per_iter", c.candidates_per_iter},
          {"drop_count", c.drop_count},
          {"drop_radius", c.drop_radius},
          {"sigma_ratio", c.sigma_ratio},
          {"fisheye_strength", c.fisheye_strength},
          {"saliency_quantile", c.saliency_quantile},
          {"rng_seed", c.rng_seed},
          {"target_class", c.target_class}};
}

CriticalMask::CriticalMask(int width, int height, std::vector<std::uint8_t> allowed)
    : width_(width), height_(height), allowed_(std::move(allowed)) {
  if (allowed_.size() != static_cast<std::size_t>(width) * height) {
    throw Error(ErrorCode::DimensionMismatch, "mask size does not match its dimensions");
  }
  for (std::size_t i = 0; i < allowed_.size(); ++i) {
    if (allowed_[i]) pixels_.push_back(static_cast<std::uint32_t>(i));
  }
  if (pixels_.empty()) throw Error(ErrorCode::EmptyMask, "critical mask has no allowed pixel");
}

CriticalMask CriticalMask::full(int width, int height) {
  return CriticalMask(width, height,
                      std::vector<std::uint8_t>(static_cast<std::size_t>(width) * height, 1));
}

CriticalMask critical_mask(std::span<const Heatmap> heatmaps, double q) {
  if (heatmaps.empty()) throw Error(ErrorCode::DimensionMismatch, "no heatmaps");
  if (!(q > 0.0 && q <= 1.0)) throw Error(ErrorCode::ConfigInvalid, "q must lie in (0, 1]");
  const int w = heatmaps.front().width;
  const int h = heatmaps.front().height;
  const std::size_t count = static_cast<std::size_t>(w) * h;
  std::vector<double> mean(count, 0.0);
  for (const Heatmap& map : heatmaps) {
    if (map.width != w || map.height != h || map.values.size() != count) {
      throw Error(ErrorCode::DimensionMismatch, "heatmaps differ in size");
    }
    for (std::size_t i = 0; i < count; ++i) mean[i] += map.values[i];
  }
  for (double& v : mean) v /= static_cast<double>(heatmaps.size());

  // Linear-interpolated (1-q)-quantile.
  std::vector<double> sorted = mean;
  std::sort(sorted.begin(), sorted.end());
  const double pos = (1.0 - q) * static_cast<double>(count - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, count - 1);
  const double threshold = sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
  const double floor_value = sorted.front();

  std::vector<std::uint8_t> allowed(count, 0);
  bool any = false;
  for (std::size_t i = 0; i < count; ++i) {
    const bool keep = mean[i] >= threshold && (q == 1.0 || mean[i] > floor_value);
    allowed[i] = keep ? 1 : 0;
    any = any || keep;
  }
  if (!any) {
    const auto peak = std::max_element(mean.begin(), mean.end()) - mean.begin();
    allowed[static_cast<std::size_t>(peak)] = 1;
  }
  return CriticalMask(w, h, std::move(allowed));
}

std::vector<Raindrop> sample_candidate(const CriticalMask& mask, int n, double r,
                                       CounterRng& rng) {
  const auto& pixels = mask.pixels();
  if (pixels.empty()) throw Error(ErrorCode::EmptyMask, "critical mask has no allowed pixel");
  std::vector<Raindrop> drops;
  drops.reserve(static_cast<std::size_t>(std::max(n, 0)));
  for (int k = 0; k < n; ++k) {
    const std::uint32_t index = pixels[rng.next_below(pixels.size())];
    const double jx = rng.next_double();
    const double jy = rng.next_double();
    const auto px = static_cast<int>(index % static_cast<std::uint32_t>(mask.width()));
    const auto py = static_cast<int>(index / static_cast<std::uint32_t>(mask.width()));
    drops.push_back(Raindrop{px + jx, py + jy, r});
  }
  return drops;
}

namespace {

void check_inputs(std::span<const ImageBuffer> images, std::span<const int> labels,
                  const Oracle& oracle) {
  check_batch(images);
  if (labels.size() != images.size()) {
    throw Error(ErrorCode::DimensionMismatch, std::to_string(images.size()) + " images but " +
                                                  std::to_string(labels.size()) + " labels");
  }
  for (int label : labels) {
    if (label < 0 || label >= oracle.class_count()) {
      throw Error(ErrorCode::ClassOutOfRange, "label " + std::to_string(label));
    }
  }
}

PatternScore score_predictions(std::span<const ClassScores> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw Error(ErrorCode::ProtocolError, "oracle returned the wrong number of results");
  }
  PatternScore s;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i].top1 != labels[i]) s.misclassification += 1.0;
    s.true_class_prob += class_probability(scores[i], labels[i]);
  }
  s.misclassification /= static_cast<double>(scores.size());
  s.true_class_prob /= static_cast<double>(scores.size());
  return s;
}

}  // namespace

PatternScore score_pattern(std::span<const ImageBuffer> images, std::span<const int> labels,
                           const RaindropPattern& pattern, const Oracle& oracle) {
  check_inputs(images, labels, oracle);
  std::vector<ImageBuffer> rendered;
  rendered.reserve(images.size());
  for (const ImageBuffer& img : images) rendered.push_back(render(img, pattern));
  return score_predictions(oracle.classify(rendered), labels);
}

double evaluate_pattern(std::span<const ImageBuffer> images, std::span<const int> labels,
                        const RaindropPattern& pattern, const Oracle& oracle) {
  return score_pattern(images, labels, pattern, oracle).misclassification;
}

AttackResult search_with_mask(std::span<const ImageBuffer> images, std::span<const int> labels,
                              const Oracle& oracle, const SearchConfig& config,
                              const CriticalMask& mask) {
  config.validate();
  check_inputs(images, labels, oracle);
  const int width = images.front().width();
  const int height = images.front().height();
  if (mask.width() != width || mask.height() != height) {
    throw Error(ErrorCode::DimensionMismatch, "critical mask does not match the images");
  }

  AttackResult result;
  result.config = config;
  result.clean_accuracy = 1.0 - score_predictions(oracle.classify(images), labels).misclassification;

  RaindropPattern blank;
  blank.sigma_ratio = config.sigma_ratio;
  blank.fisheye_strength = config.fisheye_strength;
  blank.image_width = width;
  blank.image_height = height;

  const auto n_cand = static_cast<std::size_t>(config.candidates_per_iter);
  const auto per_candidate = static_cast<std::uint64_t>(config.drop_count) * 3;
  const CounterRng stream(config.rng_seed);
  bool have_best = false;

  for (int t = 0; t < config.iterations; ++t) {
    std::vector<RaindropPattern> patterns(n_cand, blank);
    std::vector<PatternScore> scores(n_cand);
    detail::parallel_for(n_cand, [&](std::size_t c) {
      CounterRng rng = stream;
      rng.seek((static_cast<std::uint64_t>(t) * n_cand + c) * per_candidate);
      patterns[c].drops = merge_collisions(
          sample_candidate(mask, config.drop_count, config.drop_radius, rng));
      scores[c] = score_pattern(images, labels, patterns[c], oracle);
    });
    result.evaluations_used += static_cast<int>(n_cand);

    for (std::size_t c = 0; c < n_cand; ++c) {
      if (!have_best || scores[c].better_than(result.best_score)) {
        result.best_score = scores[c];
        result.best_pattern = std::move(patterns[c]);
        have_best = true;
      }
    }
    result.objective_trace.push_back(result.best_score.misclassification);
  }
  result.adversarial_accuracy = 1.0 - result.best_score.misclassification;
  return result;
}

AttackResult random_search(std::span<const ImageBuffer> images, std::span<const int> labels,
                           const Oracle& oracle, const SearchConfig& config) {
  config.validate();
  check_inputs(images, labels, oracle);
  if (config.target_class >= oracle.class_count()) {
    throw Error(ErrorCode::ClassOutOfRange, "target class " + std::to_string(config.target_class));
  }
  std::vector<Heatmap> heatmaps;
  heatmaps.reserve(images.size());
  for (const ImageBuffer& img : images) heatmaps.push_back(oracle.gradcam(img, config.target_class));
  return search_with_mask(images, labels, oracle, config,
                          critical_mask(heatmaps, config.saliency_quantile));
}

AttackResult random_baseline(std::span<const ImageBuffer> images, std::span<const int> labels,
                             const Oracle& oracle, const SearchConfig& config) {
  config.validate();
  check_inputs(images, labels, oracle);
  return search_with_mask(images, labels, oracle, config,
                          CriticalMask::full(images.front().width(), images.front().height()));
}

nlohmann::json attack_result_to_json(const AttackResult& result) {
  return {{"config", search_config_to_json(result.config)},
          {"clean_accuracy", result.clean_accuracy},
          {"adversarial_accuracy", result.adversarial_accuracy},
          {"objective_trace", result.objective_trace},
          {"evaluations_used", result.evaluations_used},
          {"best_pattern", pattern_to_json(result.best_pattern)}};
}

}  // namespace advrain
