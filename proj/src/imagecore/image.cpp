#include "advrain/image.hpp"

#include <algorithm>
#include <cmath>

#include "advrain/error.hpp"

namespace advrain {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ChannelOutOfRange: return "ChannelOutOfRange";
    case ErrorCode::NonPositiveSigma: return "NonPositiveSigma";
    case ErrorCode::InvalidStrength: return "InvalidStrength";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::OracleUnreachable: return "OracleUnreachable";
    case ErrorCode::ProtocolError: return "ProtocolError";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::ClassOutOfRange: return "ClassOutOfRange";
    case ErrorCode::EmptyMask: return "EmptyMask";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
  }
  return "Unknown";
}

namespace {

void check_dimensions(int width, int height, int channels) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::ConfigInvalid, "image dimensions must be >= 1");
  }
  if (channels != 1 && channels != 3) {
    throw Error(ErrorCode::ConfigInvalid, "image must have 1 or 3 channels");
  }
}

}  // namespace

ImageBuffer::ImageBuffer(int width, int height, int channels)
    : width_(width), height_(height), channels_(channels) {
  check_dimensions(width, height, channels);
  data_.assign(static_cast<std::size_t>(width) * height * channels, 0.0f);
}

ImageBuffer::ImageBuffer(int width, int height, int channels, std::vector<float> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
  check_dimensions(width, height, channels);
  if (data_.size() != static_cast<std::size_t>(width) * height * channels) {
    throw Error(ErrorCode::DimensionMismatch, "data length does not match " + shape_string());
  }
  for (float v : data_) {
    if (!(v >= 0.0f && v <= 1.0f)) {
      throw Error(ErrorCode::ConfigInvalid, "intensity outside [0,1]");
    }
  }
}

ImageBuffer ImageBuffer::filled(int width, int height, int channels, float value) {
  ImageBuffer img(width, height, channels);
  std::fill(img.data_.begin(), img.data_.end(), std::clamp(value, 0.0f, 1.0f));
  return img;
}

float ImageBuffer::clamped(int x, int y, int c) const noexcept {
  x = std::clamp(x, 0, width_ - 1);
  y = std::clamp(y, 0, height_ - 1);
  return data_[index(x, y, c)];
}

std::string ImageBuffer::shape_string() const {
  return std::to_string(width_) + "x" + std::to_string(height_) + "x" +
         std::to_string(channels_);
}

float sample_bilinear(const ImageBuffer& img, double x, double y, int c) {
  if (c < 0 || c >= img.channels()) {
    throw Error(ErrorCode::ChannelOutOfRange,
                "channel " + std::to_string(c) + " of " + img.shape_string());
  }
  x = std::clamp(x, 0.0, static_cast<double>(img.width() - 1));
  y = std::clamp(y, 0.0, static_cast<double>(img.height() - 1));
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const int x1 = std::min(x0 + 1, img.width() - 1);
  const int y1 = std::min(y0 + 1, img.height() - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  const double v00 = img.at(x0, y0, c);
  const double v10 = img.at(x1, y0, c);
  const double v01 = img.at(x0, y1, c);
  const double v11 = img.at(x1, y1, c);
  const double top = v00 + fx * (v10 - v00);
  const double bottom = v01 + fx * (v11 - v01);
  const double v = top + fy * (bottom - top);
  return std::clamp(static_cast<float>(v), 0.0f, 1.0f);
}

ImageBuffer resize_bilinear(const ImageBuffer& img, int out_w, int out_h) {
  if (out_w < 1 || out_h < 1) {
    throw Error(ErrorCode::ConfigInvalid, "resize target must be >= 1x1");
  }
  ImageBuffer out(out_w, out_h, img.channels());
  const double sx = static_cast<double>(img.width()) / out_w;
  const double sy = static_cast<double>(img.height()) / out_h;
  for (int y = 0; y < out_h; ++y) {
    const double src_y = (y + 0.5) * sy - 0.5;
    for (int x = 0; x < out_w; ++x) {
      const double src_x = (x + 0.5) * sx - 0.5;
      for (int c = 0; c < img.channels(); ++c) {
        out.at(x, y, c) = sample_bilinear(img, src_x, src_y, c);
      }
    }
  }
  return out;
}

}  // namespace advrain
