#include <algorithm>
#include <cmath>

#include "advrain/error.hpp"
#include "advrain/oracle.hpp"

namespace advrain {

int argmax_lowest(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::ShapeMismatch, "empty logits");
  int best = 0;
  for (int i = 1; i < static_cast<int>(values.size()); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

ClassScores make_scores(std::vector<double> logits) {
  const int top1 = argmax_lowest(logits);
  return ClassScores{std::move(logits), top1};
}

double class_probability(const ClassScores& scores, int cls) {
  if (cls < 0 || cls >= static_cast<int>(scores.logits.size())) {
    throw Error(ErrorCode::ClassOutOfRange, "class " + std::to_string(cls));
  }
  const double peak = *std::max_element(scores.logits.begin(), scores.logits.end());
  double total = 0.0;
  for (double l : scores.logits) total += std::exp(l - peak);
  return std::exp(scores.logits[cls] - peak) / total;
}

void check_batch(std::span<const ImageBuffer> images) {
  if (images.empty()) throw Error(ErrorCode::DimensionMismatch, "empty image batch");
  for (const ImageBuffer& img : images) {
    if (img.width() != images.front().width() || img.height() != images.front().height()) {
      throw Error(ErrorCode::DimensionMismatch, "batch mixes " + images.front().shape_string() +
                                                    " and " + img.shape_string());
    }
  }
}

SyntheticOracle::SyntheticOracle(SyntheticRule rule, int class_count)
    : rule_(rule), class_count_(class_count) {
  if (class_count < 2) throw Error(ErrorCode::ConfigInvalid, "class_count must be >= 2");
  if (rule.x1 <= rule.x0 || rule.y1 <= rule.y0) {
    throw Error(ErrorCode::ConfigInvalid, "synthetic rectangle is empty");
  }
}

double SyntheticOracle::region_mean(const ImageBuffer& image) const {
  const int x0 = std::max(rule_.x0, 0);
  const int y0 = std::max(rule_.y0, 0);
  const int x1 = std::min(rule_.x1, image.width());
  const int y1 = std::min(rule_.y1, image.height());
  if (x1 <= x0 || y1 <= y0) {
    throw Error(ErrorCode::DimensionMismatch,
                "synthetic rectangle lies outside " + image.shape_string());
  }
  double sum = 0.0;
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) {
      for (int c = 0; c < image.channels(); ++c) sum += image.at(x, y, c);
    }
  }
  return sum / (static_cast<double>(x1 - x0) * (y1 - y0) * image.channels());
}

std::vector<ClassScores> SyntheticOracle::classify(std::span<const ImageBuffer> images) const {
  check_batch(images);
  std::vector<ClassScores> out;
  out.reserve(images.size());
  for (const ImageBuffer& img : images) {
    const double margin = region_mean(img) - rule_.threshold;
    std::vector<double> logits(static_cast<std::size_t>(class_count_), -std::abs(margin) - 1.0);
    logits[0] = -margin;
    logits[1] = margin;
    out.push_back(make_scores(std::move(logits)));
  }
  return out;
}

Heatmap SyntheticOracle::gradcam(const ImageBuffer& image, int target_class) const {
  if (target_class < 0 || target_class >= class_count_) {
    throw Error(ErrorCode::ClassOutOfRange, "class " + std::to_string(target_class));
  }
  Heatmap map{image.width(), image.height(),
              std::vector<float>(static_cast<std::size_t>(image.width()) * image.height(), 0.0f)};
  for (int y = std::max(rule_.y0, 0); y < std::min(rule_.y1, image.height()); ++y) {
    for (int x = std::max(rule_.x0, 0); x < std::min(rule_.x1, image.width()); ++x) {
      map.values[static_cast<std::size_t>(y) * map.width + x] = 1.0f;
    }
  }
  return map;
}

std::unique_ptr<Oracle> make_oracle(const OracleConfig& config) {
  if (config.endpoint.has_value() == config.synthetic.has_value()) {
    throw Error(ErrorCode::ConfigInvalid, "oracle needs exactly one of endpoint or synthetic");
  }
  if (config.synthetic) {
    return std::make_unique<SyntheticOracle>(*config.synthetic, config.class_count);
  }
  return std::make_unique<RemoteOracle>(*config.endpoint, config.class_count, config.timeout_ms);
}

OracleConfig oracle_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::ConfigInvalid, "oracle must be an object");
  OracleConfig config;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "endpoint") {
        config.endpoint = value.get<std::string>();
      } else if (key == "synthetic") {
        SyntheticRule rule;
        rule.x0 = value.at("x0").get<int>();
        rule.y0 = value.at("y0").get<int>();
        rule.x1 = value.at("x1").get<int>();
        rule.y1 = value.at("y1").get<int>();
        rule.threshold = value.value("threshold", 0.5);
        config.synthetic = rule;
      } else if (key == "timeout_ms") {
        config.timeout_ms = value.get<int>();
      } else if (key == "class_count") {
        config.class_count = value.get<int>();
      } else {
        throw Error(ErrorCode::ConfigInvalid, "unknown oracle field '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigInvalid, std::string("oracle config: ") + e.what());
  }
  if (config.endpoint.has_value() == config.synthetic.has_value()) {
    throw Error(ErrorCode::ConfigInvalid, "oracle needs exactly one of endpoint or synthetic");
  }
  if (config.class_count < 2) throw Error(ErrorCode::ConfigInvalid, "class_count must be >= 2");
  if (config.timeout_ms < 1) throw Error(ErrorCode::ConfigInvalid, "timeout_ms must be >= 1");
  return config;
}

nlohmann::json oracle_config_to_json(const OracleConfig& config) {
  nlohmann::json j{{"timeout_ms", config.timeout_ms}, {"class_count", config.class_count}};
  if (config.endpoint) j["endpoint"] = *config.endpoint;
  if (config.synthetic) {
    const auto& r = *config.synthetic;
    j["synthetic"] = {{"x0", r.x0}, {"y0", r.y0}, {"x1", r.x1}, {"y1", r.y1},
                      {"threshold", r.threshold}};
  }
  return j;
}

}  // namespace advrain
