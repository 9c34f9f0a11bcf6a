#include <cmath>

#include "advrain/error.hpp"
#include "advrain/metrics.hpp"

namespace advrain {

namespace {

std::vector<double> gaussian_window(int size, double sigma) {
  std::vector<double> w(static_cast<std::size_t>(size) * size);
  const double center = (size - 1) / 2.0;
  double total = 0.0;
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const double dx = x - center;
      const double dy = y - center;
      const double v = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
      w[static_cast<std::size_t>(y) * size + x] = v;
      total += v;
    }
  }
  for (double& v : w) v /= total;
  return w;
}

}  // namespace

double ssim(const ImageBuffer& a, const ImageBuffer& b, const SsimParams& params) {
  if (!a.same_shape(b)) {
    throw Error(ErrorCode::DimensionMismatch, a.shape_string() + " vs " + b.shape_string());
  }
  const int win = params.window;
  if (win < 1 || a.width() < win || a.height() < win) {
    throw Error(ErrorCode::DimensionMismatch,
                a.shape_string() + " is smaller than the " + std::to_string(win) +
                    "px SSIM window");
  }
  const auto weights = gaussian_window(win, params.sigma);
  const double c1 = std::pow(params.k1 * params.dynamic_range, 2);
  const double c2 = std::pow(params.k2 * params.dynamic_range, 2);
  const int out_w = a.width() - win + 1;
  const int out_h = a.height() - win + 1;

  double channel_sum = 0.0;
  for (int c = 0; c < a.channels(); ++c) {
    double window_sum = 0.0;
    for (int y = 0; y < out_h; ++y) {
      for (int x = 0; x < out_w; ++x) {
        double mx = 0.0, my = 0.0, xx = 0.0, yy = 0.0, xy = 0.0;
        for (int v = 0; v < win; ++v) {
          for (int u = 0; u < win; ++u) {
            const double w = weights[static_cast<std::size_t>(v) * win + u];
            const double p = a.at(x + u, y + v, c);
            const double q = b.at(x + u, y + v, c);
            mx += w * p;
            my += w * q;
            xx += w * p * p;
            yy += w * q * q;
            xy += w * p * q;
          }
        }
        const double var_x = xx - mx * mx;
        const double var_y = yy - my * my;
        const double cov = xy - mx * my;
        window_sum += ((2.0 * mx * my + c1) * (2.0 * cov + c2)) /
                      ((mx * mx + my * my + c1) * (var_x + var_y + c2));
      }
    }
    channel_sum += window_sum / (static_cast<double>(out_w) * out_h);
  }
  return channel_sum / a.channels();
}

}  // namespace advrain
