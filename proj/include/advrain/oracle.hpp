#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "advrain/image.hpp"

namespace advrain {

struct ClassScores {
  std::vector<double> logits;
  int top1 = 0;

  friend bool operator==(const ClassScores&, const ClassScores&) = default;
};

/// Index of the largest value; ties go to the lowest index.
int argmax_lowest(std::span<const double> values);
ClassScores make_scores(std::vector<double> logits);
/// Softmax probability of `cls` under the given logits.
double class_probability(const ClassScores& scores, int cls);

struct Heatmap {
  int width = 0;
  int height = 0;
  std::vector<float> values;  ///< row-major, in [0,1]

  float at(int x, int y) const noexcept {
    return values[static_cast<std::size_t>(y) * width + x];
  }
  friend bool operator==(const Heatmap&, const Heatmap&) = default;
};

/// Class 1 iff the mean intensity over [x0,x1) x [y0,y1) exceeds threshold.
struct SyntheticRule {
  int x0 = 0;
  int y0 = 0;
  int x1 = 1;
  int y1 = 1;
  double threshold = 0.5;
};

struct OracleConfig {
  std::optional<std::string> endpoint;
  std::optional<SyntheticRule> synthetic;
  int timeout_ms = 30000;
  int class_count = 2;
};

OracleConfig oracle_config_from_json(const nlohmann::json& j);
nlohmann::json oracle_config_to_json(const OracleConfig& config);

/// Black-box classifier plus saliency. Implementations are safe to call from
/// several threads at once.
class Oracle {
 public:
  virtual ~Oracle() = default;

  virtual int class_count() const noexcept = 0;
  /// One result per image, in order. Images must share dimensions.
  virtual std::vector<ClassScores> classify(std::span<const ImageBuffer> images) const = 0;
  /// Saliency for target_class at the image's resolution, max normalized to 1.
  virtual Heatmap gradcam(const ImageBuffer& image, int target_class) const = 0;
};

class SyntheticOracle final : public Oracle {
 public:
  explicit SyntheticOracle(SyntheticRule rule, int class_count = 2);

  int class_count() const noexcept override { return class_count_; }
  std::vector<ClassScores> classify(std::span<const ImageBuffer> images) const override;
  Heatmap gradcam(const ImageBuffer& image, int target_class) const override;

  const SyntheticRule& rule() const noexcept { return rule_; }
  /// Mean intensity over the decision rectangle (clipped to the image).
  double region_mean(const ImageBuffer& image) const;

 private:
  SyntheticRule rule_;
  int class_count_;
};

/// HTTP/JSON client for a model-serving sidecar.
class RemoteOracle final : public Oracle {
 public:
  RemoteOracle(std::string endpoint, int class_count, int timeout_ms = 30000);

  int class_count() const noexcept override { return class_count_; }
  std::vector<ClassScores> classify(std::span<const ImageBuffer> images) const override;
  Heatmap gradcam(const ImageBuffer& image, int target_class) const override;

 private:
  nlohmann::json post(const std::string& route, const nlohmann::json& body) const;

  std::string endpoint_;
  int class_count_;
  int timeout_ms_;
};

std::unique_ptr<Oracle> make_oracle(const OracleConfig& config);

/// Throws DimensionMismatch unless images is non-empty with equal shapes.
void check_batch(std::span<const ImageBuffer> images);

namespace protocol {

std::string base64_encode(std::span<const unsigned char> bytes);
std::vector<unsigned char> base64_decode(const std::string& text);

nlohmann::json classify_request(std::span<const ImageBuffer> images);
nlohmann::json classify_response(std::span<const ClassScores> results);
std::vector<ClassScores> parse_classify_response(const nlohmann::json& body,
                                                 std::size_t expected_count, int class_count);

nlohmann::json gradcam_request(const ImageBuffer& image, int target_class);
nlohmann::json gradcam_response(const Heatmap& heatmap);
Heatmap parse_gradcam_response(const nlohmann::json& body, int width, int height);

/// Server-side request decoding; ProtocolError on malformed bodies.
std::vector<ImageBuffer> parse_classify_request(const nlohmann::json& body);
std::pair<ImageBuffer, int> parse_gradcam_request(const nlohmann::json& body);

}  // namespace protocol

}  // namespace advrain
