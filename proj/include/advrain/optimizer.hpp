#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "advrain/image.hpp"
#include "advrain/oracle.hpp"
#include "advrain/render.hpp"
#include "advrain/rng.hpp"

namespace advrain {

struct SearchConfig {
  int iterations = 20;           ///< T
  int candidates_per_iter = 25;  ///< N
  int drop_count = 10;           ///< n
  double drop_radius = 10.0;     ///< r, pixels
  double sigma_ratio = 0.5;
  double fisheye_strength = 1.5;
  double saliency_quantile = 0.3;  ///< q in (0, 1]
  std::uint64_t rng_seed = 0;
  int target_class = 0;

  /// Throws ConfigInvalid on out-of-range fields.
  void validate() const;
};

SearchConfig search_config_from_json(const nlohmann::json& j);
nlohmann::json search_config_to_json(const SearchConfig& config);

/// Pixels from which drop centers may be drawn.
class CriticalMask {
 public:
  CriticalMask(int width, int height, std::vector<std::uint8_t> allowed);
  static CriticalMask full(int width, int height);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool allowed(int x, int y) const noexcept {
    return allowed_[static_cast<std::size_t>(y) * width_ + x] != 0;
  }
  /// Row-major indices of allowed pixels, ascending.
  const std::vector<std::uint32_t>& pixels() const noexcept { return pixels_; }

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> allowed_;
  std::vector<std::uint32_t> pixels_;
};

/// Averages the heatmaps and keeps pixels at or above the (1-q)-quantile.
/// Pixels sitting at the map's minimum are admitted only when q == 1; an empty
/// result falls back to the single maximum pixel.
CriticalMask critical_mask(std::span<const Heatmap> heatmaps, double q);

/// Draws n drops of radius r, consuming exactly 3n values from rng
/// (pixel index, x jitter, y jitter per drop).
std::vector<Raindrop> sample_candidate(const CriticalMask& mask, int n, double r,
                                       CounterRng& rng);

struct PatternScore {
  double misclassification = 0.0;  ///< fraction of images with top1 != label
  double true_class_prob = 0.0;    ///< mean softmax probability of the label

  /// Higher misclassification wins; ties go to the lower true-class probability.
  bool better_than(const PatternScore& other) const noexcept {
    if (misclassification != other.misclassification) {
      return misclassification > other.misclassification;
    }
    return true_class_prob < other.true_class_prob;
  }
};

/// One classify call over the rendered batch.
PatternScore score_pattern(std::span<const ImageBuffer> images, std::span<const int> labels,
                           const RaindropPattern& pattern, const Oracle& oracle);
double evaluate_pattern(std::span<const ImageBuffer> images, std::span<const int> labels,
                        const RaindropPattern& pattern, const Oracle& oracle);

struct AttackResult {
  SearchConfig config;
  RaindropPattern best_pattern;
  PatternScore best_score;
  std::vector<double> objective_trace;  ///< best-so-far misclassification per iteration
  double clean_accuracy = 0.0;
  double adversarial_accuracy = 0.0;
  int evaluations_used = 0;
};

nlohmann::json attack_result_to_json(const AttackResult& result);

/// Saliency-guided random search for one universal pattern.
AttackResult random_search(std::span<const ImageBuffer> images, std::span<const int> labels,
                           const Oracle& oracle, const SearchConfig& config);

/// Same budget and sampler, but centers are drawn from the whole image.
AttackResult random_baseline(std::span<const ImageBuffer> images, std::span<const int> labels,
                             const Oracle& oracle, const SearchConfig& config);

/// Core loop shared by both entry points.
AttackResult search_with_mask(std::span<const ImageBuffer> images, std::span<const int> labels,
                              const Oracle& oracle, const SearchConfig& config,
                              const CriticalMask& mask);

}  // namespace advrain
