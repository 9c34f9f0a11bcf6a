#include <algorithm>
#include <cmath>
#include <map>

#include "advrain/error.hpp"
#include "advrain/render.hpp"

namespace advrain {

namespace {

bool drop_order(const Raindrop& l, const Raindrop& r) {
  if (l.cy != r.cy) return l.cy < r.cy;
  if (l.cx != r.cx) return l.cx < r.cx;
  return l.radius < r.radius;
}

bool collides(const Raindrop& l, const Raindrop& r) {
  const double dist = std::hypot(l.cx - r.cx, l.cy - r.cy);
  return dist < std::max(l.radius, r.radius);
}

Raindrop coalesce(const Raindrop& l, const Raindrop& r) {
  const double wl = l.radius * l.radius;
  const double wr = r.radius * r.radius;
  const double total = wl + wr;
  return Raindrop{(wl * l.cx + wr * r.cx) / total, (wl * l.cy + wr * r.cy) / total,
                  std::sqrt(total)};
}

}  // namespace

std::vector<Raindrop> merge_collisions(std::vector<Raindrop> drops) {
  std::sort(drops.begin(), drops.end(), drop_order);
  bool merged = true;
  while (merged) {
    merged = false;
    for (std::size_t i = 0; i < drops.size() && !merged; ++i) {
      for (std::size_t j = i + 1; j < drops.size(); ++j) {
        if (collides(drops[i], drops[j])) {
          drops[i] = coalesce(drops[i], drops[j]);
          drops.erase(drops.begin() + static_cast<std::ptrdiff_t>(j));
          std::sort(drops.begin(), drops.end(), drop_order);
          merged = true;
          break;
        }
      }
    }
  }
  return drops;
}

ImageBuffer render(const ImageBuffer& img, const RaindropPattern& pattern,
                   const DropShape& shape) {
  if (pattern.image_width != img.width() || pattern.image_height != img.height()) {
    throw Error(ErrorCode::DimensionMismatch,
                "pattern is for " + std::to_string(pattern.image_width) + "x" +
                    std::to_string(pattern.image_height) + ", image is " +
                    std::to_string(img.width()) + "x" + std::to_string(img.height()));
  }
  if (!(pattern.fisheye_strength >= 1.0)) {
    throw Error(ErrorCode::InvalidStrength,
                "fisheye strength k = " + std::to_string(pattern.fisheye_strength));
  }
  if (!(pattern.sigma_ratio > 0.0)) {
    throw Error(ErrorCode::NonPositiveSigma,
                "sigma_ratio = " + std::to_string(pattern.sigma_ratio));
  }

  ImageBuffer out = img;
  std::map<double, GaussianKernel> kernels;
  for (const Raindrop& drop : merge_collisions(pattern.drops)) {
    if (!(drop.radius > 0.0)) {
      throw Error(ErrorCode::ConfigInvalid, "drop radius must be positive");
    }
    out = fisheye_warp(out, drop, pattern.fisheye_strength, shape);
    auto it = kernels.find(drop.radius);
    if (it == kernels.end()) {
      it = kernels.emplace(drop.radius, GaussianKernel(pattern.sigma_ratio * drop.radius)).first;
    }
    out = blur_region(out, drop_footprint(drop, img.width(), img.height(), shape), it->second);
  }
  return out;
}

}  // namespace advrain
