#include <cstdio>
#include <sstream>

#include "advrain/error.hpp"
#include "advrain/metrics.hpp"

namespace advrain {

EvalReport tally(std::span<const int> labels, std::span<const int> clean_top1,
                 std::span<const int> adv_top1, std::span<const double> ssim_values) {
  const std::size_t n = labels.size();
  if (n == 0 || clean_top1.size() != n || adv_top1.size() != n || ssim_values.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "evaluation inputs are not aligned");
  }
  EvalReport report;
  report.total = static_cast<int>(n);
  int clean_correct = 0;
  int adv_correct = 0;
  int flipped = 0;
  double ssim_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ClassStats& cls = report.per_class[labels[i]];
    ++cls.count;
    const bool was_correct = clean_top1[i] == labels[i];
    const bool is_correct = adv_top1[i] == labels[i];
    if (was_correct) {
      ++clean_correct;
      cls.clean_acc += 1.0;
      if (!is_correct) ++flipped;
    }
    if (is_correct) {
      ++adv_correct;
      cls.adv_acc += 1.0;
    }
    ssim_sum += ssim_values[i];
  }
  for (auto& [label, cls] : report.per_class) {
    cls.clean_acc /= cls.count;
    cls.adv_acc /= cls.count;
  }
  report.clean_accuracy = static_cast<double>(clean_correct) / static_cast<double>(n);
  report.overall_accuracy = static_cast<double>(adv_correct) / static_cast<double>(n);
  report.attack_success_rate =
      clean_correct == 0 ? 0.0 : static_cast<double>(flipped) / clean_correct;
  report.mean_ssim = ssim_sum / static_cast<double>(n);
  return report;
}

EvalReport evaluate(std::span<const ImageBuffer> images, std::span<const int> labels,
                    const RaindropPattern& pattern, const Oracle& oracle) {
  check_batch(images);
  if (labels.size() != images.size()) {
    throw Error(ErrorCode::DimensionMismatch, "images and labels differ in length");
  }
  std::vector<ImageBuffer> rendered;
  std::vector<double> similarity;
  rendered.reserve(images.size());
  similarity.reserve(images.size());
  for (const ImageBuffer& img : images) {
    rendered.push_back(render(img, pattern));
    similarity.push_back(ssim(img, rendered.back()));
  }
  const auto clean = oracle.classify(images);
  const auto adv = oracle.classify(rendered);
  if (clean.size() != images.size() || adv.size() != images.size()) {
    throw Error(ErrorCode::ProtocolError, "oracle returned the wrong number of results");
  }
  std::vector<int> clean_top1, adv_top1;
  for (const auto& s : clean) clean_top1.push_back(s.top1);
  for (const auto& s : adv) adv_top1.push_back(s.top1);
  return tally(labels, clean_top1, adv_top1, similarity);
}

nlohmann::json eval_report_to_json(const EvalReport& report) {
  nlohmann::json per_class = nlohmann::json::object();
  for (const auto& [label, cls] : report.per_class) {
    per_class[std::to_string(label)] = {
        {"count", cls.count}, {"clean_acc", cls.clean_acc}, {"adv_acc", cls.adv_acc}};
  }
  return {{"total", report.total},
          {"clean_accuracy", report.clean_accuracy},
          {"overall_accuracy", report.overall_accuracy},
          {"attack_success_rate", report.attack_success_rate},
          {"asr_denominator", "initially_correct"},
          {"mean_ssim", report.mean_ssim},
          {"per_class", std::move(per_class)}};
}

std::string sweep_csv(std::span<const SweepRow> rows) {
  std::ostringstream out;
  out << kSweepCsvHeader << '\n';
  char line[256];
  for (const SweepRow& r : rows) {
    std::snprintf(line, sizeof line, "%d,%.6g,%.6f,%.6f,%.6f,%.6f\n", r.n_drops, r.radius,
                  r.clean_acc, r.adv_acc, r.asr, r.mean_ssim);
    out << line;
  }
  return out.str();
}

}  // namespace advrain
