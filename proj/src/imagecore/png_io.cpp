#include <png.h>

#include <cmath>
#include <fstream>
#include <iterator>

#include "advrain/error.hpp"
#include "advrain/image.hpp"

namespace advrain {

namespace {

constexpr std::size_t kIhdrBitDepth = 24;
constexpr std::size_t kIhdrColorType = 25;

struct ImageHandle {
  png_image image{};
  ImageHandle() { image.version = PNG_IMAGE_VERSION; }
  ~ImageHandle() { png_image_free(&image); }
};

// The simplified read API hides the source bit depth, so IHDR is checked first.
void check_header(std::span<const unsigned char> bytes) {
  if (bytes.size() < 33 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
    throw Error(ErrorCode::UnsupportedFormat, "not a PNG stream");
  }
  const int bit_depth = bytes[kIhdrBitDepth];
  const int color_type = bytes[kIhdrColorType];
  if (bit_depth != 8) {
    throw Error(ErrorCode::UnsupportedFormat,
                "bit depth " + std::to_string(bit_depth) + " (only 8 supported)");
  }
  if (color_type == PNG_COLOR_TYPE_PALETTE) {
    throw Error(ErrorCode::UnsupportedFormat, "palette PNGs are not supported");
  }
  if (color_type != PNG_COLOR_TYPE_GRAY && color_type != PNG_COLOR_TYPE_GRAY_ALPHA &&
      color_type != PNG_COLOR_TYPE_RGB && color_type != PNG_COLOR_TYPE_RGB_ALPHA) {
    throw Error(ErrorCode::UnsupportedFormat, "color type " + std::to_string(color_type));
  }
}

}  // namespace

unsigned char to_byte(float intensity) noexcept {
  const double scaled = std::floor(static_cast<double>(intensity) * 255.0 + 0.5);
  if (!(scaled > 0.0)) return 0;
  if (scaled >= 255.0) return 255;
  return static_cast<unsigned char>(scaled);
}

ImageBuffer decode_png(std::span<const unsigned char> bytes) {
  check_header(bytes);
  ImageHandle h;
  if (!png_image_begin_read_from_memory(&h.image, bytes.data(), bytes.size())) {
    throw Error(ErrorCode::UnsupportedFormat, h.image.message);
  }
  const bool color = (h.image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  const bool alpha = (h.image.format & PNG_FORMAT_FLAG_ALPHA) != 0;
  const int channels = color ? 3 : 1;
  const int stored = channels + (alpha ? 1 : 0);
  h.image.format = color ? (alpha ? PNG_FORMAT_RGBA : PNG_FORMAT_RGB)
                         : (alpha ? PNG_FORMAT_GA : PNG_FORMAT_GRAY);

  const auto width = static_cast<int>(h.image.width);
  const auto height = static_cast<int>(h.image.height);
  std::vector<unsigned char> raw(PNG_IMAGE_SIZE(h.image));
  if (!png_image_finish_read(&h.image, nullptr, raw.data(), 0, nullptr)) {
    throw Error(ErrorCode::UnsupportedFormat, h.image.message);
  }

  ImageBuffer img(width, height, channels);
  auto out = img.data();
  for (std::size_t px = 0; px < static_cast<std::size_t>(width) * height; ++px) {
    const unsigned char* src = raw.data() + px * stored;
    const float a = alpha ? src[stored - 1] / 255.0f : 1.0f;
    for (int c = 0; c < channels; ++c) {
      const float v = src[c] / 255.0f;
      out[px * channels + c] = alpha ? v * a : v;
    }
  }
  return img;
}

ImageBuffer load_image(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(ErrorCode::FileNotFound, path.string());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                         std::istreambuf_iterator<char>());
  try {
    return decode_png(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::vector<unsigned char> encode_png(const ImageBuffer& img) {
  if (img.empty()) throw Error(ErrorCode::IoError, "cannot encode an empty image");
  std::vector<unsigned char> pixels(img.size());
  const auto values = img.data();
  for (std::size_t i = 0; i < values.size(); ++i) pixels[i] = to_byte(values[i]);

  ImageHandle h;
  h.image.width = static_cast<png_uint_32>(img.width());
  h.image.height = static_cast<png_uint_32>(img.height());
  h.image.format = img.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;

  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&h.image, nullptr, &size, 0, pixels.data(), 0, nullptr)) {
    throw Error(ErrorCode::IoError, h.image.message);
  }
  std::vector<unsigned char> out(size);
  if (!png_image_write_to_memory(&h.image, out.data(), &size, 0, pixels.data(), 0, nullptr)) {
    throw Error(ErrorCode::IoError, h.image.message);
  }
  out.resize(size);
  return out;
}

void save_image(const ImageBuffer& img, const std::filesystem::path& path) {
  const auto bytes = encode_png(img);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoError, "short write to " + path.string());
}

}  // namespace advrain
