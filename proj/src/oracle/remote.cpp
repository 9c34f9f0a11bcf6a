#include <httplib.h>

#include <regex>

#include "advrain/error.hpp"
#include "advrain/oracle.hpp"

namespace advrain {

namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string prefix;  // path prefix without trailing slash
};

Endpoint split_endpoint(const std::string& url) {
  static const std::regex pattern(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, pattern)) {
    throw Error(ErrorCode::ConfigInvalid, "oracle endpoint is not an http URL: " + url);
  }
  std::string prefix = m[2].matched ? m[2].str() : "";
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {m[1].str(), prefix};
}

}  // namespace

RemoteOracle::RemoteOracle(std::string endpoint, int class_count, int timeout_ms)
    : endpoint_(std::move(endpoint)), class_count_(class_count), timeout_ms_(timeout_ms) {
  if (class_count < 2) throw Error(ErrorCode::ConfigInvalid, "class_count must be >= 2");
  split_endpoint(endpoint_);
}

// A fresh client per request keeps the handle shareable across threads.
nlohmann::json RemoteOracle::post(const std::string& route, const nlohmann::json& body) const {
  const Endpoint ep = split_endpoint(endpoint_);
  httplib::Client client(ep.origin);
  const auto timeout = std::chrono::milliseconds(timeout_ms_);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);

  auto res = client.Post(ep.prefix + route, body.dump(), "application/json");
  if (!res) {
    throw Error(ErrorCode::OracleUnreachable,
                endpoint_ + route + ": " + httplib::to_string(res.error()));
  }
  nlohmann::json reply;
  try {
    reply = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::parse_error&) {
    throw Error(ErrorCode::ProtocolError,
                route + " returned non-JSON body (HTTP " + std::to_string(res->status) + ")");
  }
  if (res->status == 422) {
    throw Error(ErrorCode::ClassOutOfRange, reply.value("error", std::string("HTTP 422")));
  }
  if (res->status != 200) {
    const std::string message =
        reply.is_object() ? reply.value("error", std::string{}) : std::string{};
    throw Error(ErrorCode::ProtocolError,
                route + " HTTP " + std::to_string(res->status) + ": " + message);
  }
  return reply;
}

std::vector<ClassScores> RemoteOracle::classify(std::span<const ImageBuffer> images) const {
  check_batch(images);
  const auto reply = post("/v1/classify", protocol::classify_request(images));
  return protocol::parse_classify_response(reply, images.size(), class_count_);
}

Heatmap RemoteOracle::gradcam(const ImageBuffer& image, int target_class) const {
  if (target_class < 0 || target_class >= class_count_) {
    throw Error(ErrorCode::ClassOutOfRange, "class " + std::to_string(target_class));
  }
  const auto reply = post("/v1/gradcam", protocol::gradcam_request(image, target_class));
  return protocol::parse_gradcam_response(reply, image.width(), image.height());
}

}  // namespace advrain
