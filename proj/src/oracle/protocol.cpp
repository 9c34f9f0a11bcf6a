#include <openssl/evp.h>

#include <cmath>

#include "advrain/error.hpp"
#include "advrain/oracle.hpp"

namespace advrain::protocol {

namespace {

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorCode::ProtocolError, what);
}

const nlohmann::json& field(const nlohmann::json& body, const char* key) {
  if (!body.is_object() || !body.contains(key)) malformed(std::string("missing '") + key + "'");
  return body.at(key);
}

ImageBuffer decode_image_field(const nlohmann::json& value) {
  if (!value.is_string()) malformed("image must be a base64 string");
  const auto bytes = base64_decode(value.get<std::string>());
  try {
    return decode_png(bytes);
  } catch (const Error& e) {
    malformed(std::string("image payload: ") + e.what());
  }
}

}  // namespace

std::string base64_encode(std::span<const unsigned char> bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::vector<unsigned char> base64_decode(const std::string& text) {
  if (text.size() % 4 != 0) malformed("base64 length is not a multiple of 4");
  std::vector<unsigned char> out(3 * (text.size() / 4));
  const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()),
                                static_cast<int>(text.size()));
  if (n < 0) malformed("invalid base64");
  // EVP_DecodeBlock keeps the zero bytes produced by '=' padding.
  std::size_t size = static_cast<std::size_t>(n);
  if (!text.empty() && text.back() == '=') --size;
  if (text.size() >= 2 && text[text.size() - 2] == '=') --size;
  out.resize(size);
  return out;
}

nlohmann::json classify_request(std::span<const ImageBuffer> images) {
  nlohmann::json list = nlohmann::json::array();
  for (const ImageBuffer& img : images) list.push_back(base64_encode(encode_png(img)));
  return {{"images", std::move(list)}};
}

nlohmann::json classify_response(std::span<const ClassScores> results) {
  nlohmann::json list = nlohmann::json::array();
  for (const ClassScores& s : results) list.push_back({{"logits", s.logits}, {"top1", s.top1}});
  return {{"results", std::move(list)}};
}

std::vector<ClassScores> parse_classify_response(const nlohmann::json& body,
                                                 std::size_t expected_count, int class_count) {
  const auto& results = field(body, "results");
  if (!results.is_array()) malformed("'results' must be an array");
  if (results.size() != expected_count) {
    malformed("expected " + std::to_string(expected_count) + " results, got " +
              std::to_string(results.size()));
  }
  std::vector<ClassScores> out;
  out.reserve(expected_count);
  for (const auto& entry : results) {
    const auto& logits = field(entry, "logits");
    const auto& top1 = field(entry, "top1");
    if (!logits.is_array() || !top1.is_number_integer()) malformed("bad result entry");
    std::vector<double> values;
    for (const auto& v : logits) {
      if (!v.is_number()) malformed("logits must be numbers");
      values.push_back(v.get<double>());
    }
    if (static_cast<int>(values.size()) != class_count) {
      throw Error(ErrorCode::ShapeMismatch, "expected " + std::to_string(class_count) +
                                                " logits, got " + std::to_string(values.size()));
    }
    ClassScores scores = make_scores(std::move(values));
    if (scores.top1 != top1.get<int>()) {
      malformed("top1 " + std::to_string(top1.get<int>()) + " disagrees with argmax " +
                std::to_string(scores.top1));
    }
    out.push_back(std::move(scores));
  }
  return out;
}

nlohmann::json gradcam_request(const ImageBuffer& image, int target_class) {
  return {{"image", base64_encode(encode_png(image))}, {"target_class", target_class}};
}

nlohmann::json gradcam_response(const Heatmap& heatmap) {
  return {{"width", heatmap.width}, {"height", heatmap.height}, {"values", heatmap.values}};
}

Heatmap parse_gradcam_response(const nlohmann::json& body, int width, int height) {
  const auto& w = field(body, "width");
  const auto& h = field(body, "height");
  const auto& values = field(body, "values");
  if (!w.is_number_integer() || !h.is_number_integer() || !values.is_array()) {
    malformed("bad gradcam response types");
  }
  if (w.get<int>() != width || h.get<int>() != height) {
    malformed("heatmap is " + std::to_string(w.get<int>()) + "x" + std::to_string(h.get<int>()) +
              ", expected " + std::to_string(width) + "x" + std::to_string(height));
  }
  if (values.size() != static_cast<std::size_t>(width) * height) {
    malformed("heatmap value count does not match its dimensions");
  }
  Heatmap map{width, height, {}};
  map.values.reserve(values.size());
  for (const auto& v : values) {
    if (!v.is_number()) malformed("heatmap values must be numbers");
    const double x = v.get<double>();
    if (!(x >= 0.0 && x <= 1.0)) malformed("heatmap value outside [0,1]");
    map.values.push_back(static_cast<float>(x));
  }
  return map;
}

std::vector<ImageBuffer> parse_classify_request(const nlohmann::json& body) {
  const auto& images = field(body, "images");
  if (!images.is_array() || images.empty()) malformed("'images' must be a non-empty array");
  std::vector<ImageBuffer> out;
  for (const auto& item : images) out.push_back(decode_image_field(item));
  return out;
}

std::pair<ImageBuffer, int> parse_gradcam_request(const nlohmann::json& body) {
  const auto& cls = field(body, "target_class");
  if (!cls.is_number_integer()) malformed("'target_class' must be an integer");
  return {decode_image_field(field(body, "image")), cls.get<int>()};
}

}  // namespace advrain::protocol
