#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "advrain/image.hpp"
#include "advrain/oracle.hpp"
#include "advrain/render.hpp"

namespace advrain {

/// Single-scale SSIM parameters. Intensities are normalized, so L = 1.
struct SsimParams {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 1.0;
};

/// Mean SSIM over valid (unpadded) windows, averaged per channel then across
/// channels. Throws DimensionMismatch on shape mismatch or images smaller than
/// the window.
double ssim(const ImageBuffer& a, const ImageBuffer& b, const SsimParams& params = {});

struct ClassStats {
  int count = 0;
  double clean_acc = 0.0;
  double adv_acc = 0.0;
};

struct EvalReport {
  double clean_accuracy = 0.0;
  double overall_accuracy = 0.0;  ///< accuracy on rendered images
  /// Flipped / initially-correct; 0 when nothing was classified correctly.
  double attack_success_rate = 0.0;
  std::map<int, ClassStats> per_class;
  double mean_ssim = 1.0;
  int total = 0;
};

EvalReport evaluate(std::span<const ImageBuffer> images, std::span<const int> labels,
                    const RaindropPattern& pattern, const Oracle& oracle);

/// Builds a report from predictions already computed; exposed for callers that
/// pool results across several patterns.
EvalReport tally(std::span<const int> labels, std::span<const int> clean_top1,
                 std::span<const int> adv_top1, std::span<const double> ssim_values);

nlohmann::json eval_report_to_json(const EvalReport& report);

struct SweepRow {
  int n_drops = 0;
  double radius = 0.0;
  double clean_acc = 0.0;
  double adv_acc = 0.0;
  double asr = 0.0;
  double mean_ssim = 1.0;
};

inline constexpr const char* kSweepCsvHeader = "n_drops,radius,clean_acc,adv_acc,asr,mean_ssim";
std::string sweep_csv(std::span<const SweepRow> rows);

}  // namespace advrain
