#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace advrain {

/// H x W x C image with float intensities in [0,1], stored row-major with
/// interleaved channels: index = (y * width + x) * channels + c.
class ImageBuffer {
 public:
  ImageBuffer() = default;
  /// Zero-filled buffer. Throws ConfigInvalid on bad dimensions.
  ImageBuffer(int width, int height, int channels);
  /// Takes ownership of data; every value must lie in [0,1].
  ImageBuffer(int width, int height, int channels, std::vector<float> data);

  static ImageBuffer filled(int width, int height, int channels, float value);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  std::size_t index(int x, int y, int c) const noexcept {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
  }
  float at(int x, int y, int c = 0) const noexcept { return data_[index(x, y, c)]; }
  float& at(int x, int y, int c = 0) noexcept { return data_[index(x, y, c)]; }

  /// Clamp-to-edge pixel fetch.
  float clamped(int x, int y, int c) const noexcept;

  std::span<const float> data() const noexcept { return data_; }
  std::span<float> data() noexcept { return data_; }

  bool same_shape(const ImageBuffer& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_ &&
           channels_ == other.channels_;
  }
  std::string shape_string() const;

  friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<float> data_;
};

/// Reads an 8-bit grayscale or RGB PNG (alpha composited over black).
ImageBuffer load_image(const std::filesystem::path& path);
/// Decodes PNG bytes held in memory; same rules as load_image.
ImageBuffer decode_png(std::span<const unsigned char> bytes);

/// Writes an 8-bit PNG; byte = round-half-up(intensity * 255).
void save_image(const ImageBuffer& img, const std::filesystem::path& path);
std::vector<unsigned char> encode_png(const ImageBuffer& img);

unsigned char to_byte(float intensity) noexcept;

/// Bilinear resize, pixel-center aligned, clamp-to-edge.
ImageBuffer resize_bilinear(const ImageBuffer& img, int out_w, int out_h);

/// Bilinear sample at sub-pixel (x, y); integer coordinates hit pixel centers.
float sample_bilinear(const ImageBuffer& img, double x, double y, int c);

}  // namespace advrain
