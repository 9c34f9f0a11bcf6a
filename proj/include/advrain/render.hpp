#pragma once

#include <vector>

#include "advrain/image.hpp"

namespace advrain {

struct Raindrop {
  double cx = 0.0;
  double cy = 0.0;
  double radius = 1.0;

  friend bool operator==(const Raindrop&, const Raindrop&) = default;
};

/// A universal perturbation: drop placements plus the rendering knobs needed
/// to reproduce it on any image of the size it was optimized for.
struct RaindropPattern {
  std::vector<Raindrop> drops;
  double sigma_ratio = 0.5;       ///< blur sigma = sigma_ratio * radius
  double fisheye_strength = 1.5;  ///< radial exponent k >= 1
  int image_width = 0;
  int image_height = 0;

  friend bool operator==(const RaindropPattern&, const RaindropPattern&) = default;
};

/// Footprint geometry: a circle of radius r plus an axis-aligned oval hanging
/// below it. All lengths are multiples of the drop radius.
struct DropShape {
  double oval_semi_x = 0.8;
  double oval_semi_y = 1.1;
  double oval_offset_y = 0.4;
  double feather_px = 1.0;
  /// Lens radius = oval_semi_y * lens_scale * r; must cover the whole footprint.
  double lens_scale = 1.4;
};

class GaussianKernel {
 public:
  explicit GaussianKernel(double sigma);

  double sigma() const noexcept { return sigma_; }
  int half_width() const noexcept { return half_width_; }
  int side() const noexcept { return 2 * half_width_ + 1; }
  /// W(a, b) for a, b in [-half_width, half_width].
  double weight(int a, int b) const noexcept {
    return weights_[static_cast<std::size_t>(b + half_width_) * side() + (a + half_width_)];
  }
  const std::vector<double>& weights() const noexcept { return weights_; }
  /// Normalized 1-D factor; weight(a, b) == profile(a) * profile(b) up to rounding.
  double profile(int a) const noexcept { return profile_[a + half_width_]; }

 private:
  double sigma_;
  int half_width_;
  std::vector<double> weights_;
  std::vector<double> profile_;
};

/// Throws NonPositiveSigma for sigma <= 0.
GaussianKernel gaussian_kernel(double sigma);

struct DropMask {
  int width = 0;
  int height = 0;
  std::vector<float> alpha;

  float at(int x, int y) const noexcept {
    return alpha[static_cast<std::size_t>(y) * width + x];
  }
};

DropMask drop_footprint(const Raindrop& drop, int width, int height,
                        const DropShape& shape = {});

/// Radial lens magnification inside the drop's lens circle; k == 1 is identity.
ImageBuffer fisheye_warp(const ImageBuffer& img, const Raindrop& drop, double k,
                         const DropShape& shape = {});

/// Alpha-blends a clamp-to-edge Gaussian blur of img into img under mask.
ImageBuffer blur_region(const ImageBuffer& img, const DropMask& mask,
                        const GaussianKernel& kernel);

/// Coalesces drops whose centers fall inside another drop's circle. Output is
/// sorted by (cy, cx) and independent of input order.
std::vector<Raindrop> merge_collisions(std::vector<Raindrop> drops);

/// The raindrop generator: merge, then warp and blur each drop in order.
ImageBuffer render(const ImageBuffer& img, const RaindropPattern& pattern,
                   const DropShape& shape = {});

}  // namespace advrain
