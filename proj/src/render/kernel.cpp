#include <cmath>
#include <numeric>

#include "advrain/error.hpp"
#include "advrain/render.hpp"

namespace advrain {

GaussianKernel::GaussianKernel(double sigma) : sigma_(sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorCode::NonPositiveSigma, "sigma = " + std::to_string(sigma));
  }
  half_width_ = std::max(1, static_cast<int>(std::ceil(2.0 * sigma)));
  const int n = side();
  const double denom = 2.0 * sigma * sigma;

  // The 1/(2*pi*sigma^2) prefactor cancels under normalization.
  weights_.resize(static_cast<std::size_t>(n) * n);
  for (int b = -half_width_; b <= half_width_; ++b) {
    for (int a = -half_width_; a <= half_width_; ++a) {
      weights_[static_cast<std::size_t>(b + half_width_) * n + (a + half_width_)] =
          std::exp(-(a * a + b * b) / denom);
    }
  }
  const double total = std::accumulate(weights_.begin(), weights_.end(), 0.0);
  for (double& w : weights_) w /= total;

  profile_.resize(n);
  for (int a = -half_width_; a <= half_width_; ++a) {
    profile_[a + half_width_] = std::exp(-(a * a) / denom);
  }
  const double line_total = std::accumulate(profile_.begin(), profile_.end(), 0.0);
  for (double& w : profile_) w /= line_total;
}

GaussianKernel gaussian_kernel(double sigma) { return GaussianKernel(sigma); }

}  // namespace advrain
