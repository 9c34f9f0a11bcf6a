#include <algorithm>
#include <cmath>

#include "advrain/error.hpp"
#include "advrain/render.hpp"

namespace advrain {

namespace {

struct Bounds {
  int x0, y0, x1, y1;  // inclusive; empty when x0 > x1 or y0 > y1
};

Bounds clip(double left, double top, double right, double bottom, int width, int height) {
  Bounds b{};
  b.x0 = std::max(0, static_cast<int>(std::floor(left)));
  b.y0 = std::max(0, static_cast<int>(std::floor(top)));
  b.x1 = std::min(width - 1, static_cast<int>(std::ceil(right)));
  b.y1 = std::min(height - 1, static_cast<int>(std::ceil(bottom)));
  return b;
}

}  // namespace

DropMask drop_footprint(const Raindrop& drop, int width, int height, const DropShape& shape) {
  DropMask mask{width, height, std::vector<float>(static_cast<std::size_t>(width) * height, 0.0f)};
  const double r = drop.radius;
  if (!(r > 0.0)) return mask;

  const double a = shape.oval_semi_x * r;
  const double b = shape.oval_semi_y * r;
  const double oval_cy = drop.cy + shape.oval_offset_y * r;
  const double feather = shape.feather_px;
  const double reach_x = std::max(r, a) + feather;
  const Bounds box = clip(drop.cx - reach_x, std::min(drop.cy - r, oval_cy - b) - feather,
                          drop.cx + reach_x, std::max(drop.cy + r, oval_cy + b) + feather,
                          width, height);

  for (int y = box.y0; y <= box.y1; ++y) {
    for (int x = box.x0; x <= box.x1; ++x) {
      const double dx = x - drop.cx;
      const double dy = y - drop.cy;
      const double ex = dx / a;
      const double ey = (y - oval_cy) / b;
      const double circle = dx * dx + dy * dy;
      const double oval = ex * ex + ey * ey;
      float alpha = 0.0f;
      if (circle <= r * r || oval <= 1.0) {
        alpha = 1.0f;
      } else if (feather > 0.0) {
        const double circle_dist = std::sqrt(circle) - r;
        // First-order distance to the ellipse from its normalized radius.
        const double rho = std::sqrt(oval);
        const double grad = std::hypot(ex / a, ey / b) / rho;
        const double oval_dist = (rho - 1.0) / grad;
        const double dist = std::min(circle_dist, oval_dist);
        alpha = static_cast<float>(std::clamp(1.0 - dist / feather, 0.0, 1.0));
      }
      mask.alpha[static_cast<std::size_t>(y) * width + x] = alpha;
    }
  }
  return mask;
}

ImageBuffer fisheye_warp(const ImageBuffer& img, const Raindrop& drop, double k,
                         const DropShape& shape) {
  if (!(k >= 1.0) || !std::isfinite(k)) {
    throw Error(ErrorCode::InvalidStrength, "fisheye strength k = " + std::to_string(k));
  }
  ImageBuffer out = img;
  if (k == 1.0 || !(drop.radius > 0.0)) return out;

  const double lens = shape.oval_semi_y * shape.lens_scale * drop.radius;
  const Bounds box = clip(drop.cx - lens, drop.cy - lens, drop.cx + lens, drop.cy + lens,
                          img.width(), img.height());
  const double exponent = k - 1.0;
  for (int y = box.y0; y <= box.y1; ++y) {
    for (int x = box.x0; x <= box.x1; ++x) {
      const double qx = x - drop.cx;
      const double qy = y - drop.cy;
      const double d = std::sqrt(qx * qx + qy * qy) / lens;
      if (d >= 1.0) continue;
      const double scale = exponent == 0.5 ? std::sqrt(d)
                           : exponent == 1.0 ? d
                                             : std::pow(d, exponent);
      const double sx = drop.cx + qx * scale;
      const double sy = drop.cy + qy * scale;
      for (int c = 0; c < img.channels(); ++c) {
        out.at(x, y, c) = sample_bilinear(img, sx, sy, c);
      }
    }
  }
  return out;
}

ImageBuffer blur_region(const ImageBuffer& img, const DropMask& mask,
                        const GaussianKernel& kernel) {
  if (mask.width != img.width() || mask.height != img.height() ||
      mask.alpha.size() != static_cast<std::size_t>(img.width()) * img.height()) {
    throw Error(ErrorCode::DimensionMismatch,
                "mask " + std::to_string(mask.width) + "x" + std::to_string(mask.height) +
                    " vs image " + img.shape_string());
  }
  ImageBuffer out = img;
  const int w = img.width();
  const int h = img.height();

  int x0 = w, y0 = h, x1 = -1, y1 = -1;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (mask.at(x, y) > 0.0f) {
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
      }
    }
  }
  if (x1 < x0) return out;

  const int hw = kernel.half_width();
  const int ry0 = std::max(0, y0 - hw);
  const int ry1 = std::min(h - 1, y1 + hw);
  const int cols = x1 - x0 + 1;
  const int channels = img.channels();

  // Horizontal pass over the rows the vertical pass can reach.
  const int taps = kernel.side();
  std::vector<double> profile(static_cast<std::size_t>(taps));
  for (int a = -hw; a <= hw; ++a) profile[a + hw] = kernel.profile(a);

  std::vector<double> rows(static_cast<std::size_t>(ry1 - ry0 + 1) * cols * channels);
  std::vector<double> line(static_cast<std::size_t>(cols + 2 * hw));
  for (int y = ry0; y <= ry1; ++y) {
    for (int c = 0; c < channels; ++c) {
      for (int i = 0; i < cols + 2 * hw; ++i) line[i] = img.clamped(x0 - hw + i, y, c);
      for (int i = 0; i < cols; ++i) {
        double acc = 0.0;
        for (int t = 0; t < taps; ++t) acc += profile[t] * line[i + t];
        rows[(static_cast<std::size_t>(y - ry0) * cols + i) * channels + c] = acc;
      }
    }
  }

  // Vertical pass, clamping row indices into the buffered band.
  std::vector<std::size_t> band(static_cast<std::size_t>(y1 - y0 + 1 + 2 * hw));
  for (int i = 0; i < static_cast<int>(band.size()); ++i) {
    band[i] = static_cast<std::size_t>(std::clamp(y0 - hw + i, 0, h - 1) - ry0);
  }
  const std::size_t stride = static_cast<std::size_t>(cols) * channels;
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double alpha = mask.at(x, y);
      if (alpha <= 0.0) continue;
      for (int c = 0; c < channels; ++c) {
        const std::size_t col = static_cast<std::size_t>(x - x0) * channels + c;
        double acc = 0.0;
        for (int t = 0; t < taps; ++t) acc += profile[t] * rows[band[y - y0 + t] * stride + col];
        const double blended = alpha * acc + (1.0 - alpha) * img.at(x, y, c);
        out.at(x, y, c) = static_cast<float>(std::clamp(blended, 0.0, 1.0));
      }
    }
  }
  return out;
}

}  // namespace advrain
