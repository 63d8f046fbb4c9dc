#pragma once

// Intensity thresholding shared by the reference detector and the reference
// segmenter. A pixel is foreground iff value > threshold.

#include <cstdint>
#include <limits>
#include <type_traits>
#include <vector>

#include "voxmet/volume.hpp"

namespace voxmet {

enum class ThresholdMode : std::uint8_t { Fixed, Otsu };

// Otsu's method: the threshold maximizing between-class variance over the
// histogram. Ties take the smallest threshold, which on a two-value image
// {a, b} yields t = a, separating the classes exactly, and on a constant
// image yields t = 0 (a constant-zero image stays background, a constant
// nonzero image stays foreground under the v > t rule).
template <class T>
T otsu_threshold(const Image2D<T>& img) {
  static_assert(std::is_integral_v<T>, "otsu operates on integer images");
  constexpr int n_bins = int(std::numeric_limits<T>::max()) + 1;
  std::vector<std::int64_t> hist(n_bins, 0);
  T max_value = 0;
  for (T v : img.data) {
    ++hist[v];
    if (v > max_value) max_value = v;
  }
  const double total = static_cast<double>(img.data.size());
  double sum_all = 0.0;
  for (int i = 0; i <= int(max_value); ++i) sum_all += double(i) * double(hist[i]);

  double best = -1.0;
  int best_t = 0;
  double w0 = 0.0, sum0 = 0.0;
  for (int t = 0; t <= int(max_value); ++t) {
    w0 += double(hist[t]);
    if (w0 == 0.0) continue;
    const double w1 = total - w0;
    if (w1 == 0.0) break;
    sum0 += double(t) * double(hist[t]);
    const double mu0 = sum0 / w0;
    const double mu1 = (sum_all - sum0) / w1;
    const double between = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
    if (between > best) {
      best = between;
      best_t = t;
    }
  }
  return static_cast<T>(best_t);
}

template <class T>
std::vector<std::uint8_t> apply_threshold(const Image2D<T>& img, double threshold) {
  std::vector<std::uint8_t> mask(img.data.size());
  for (std::size_t i = 0; i < img.data.size(); ++i) {
    mask[i] = static_cast<double>(img.data[i]) > threshold ? 1 : 0;
  }
  return mask;
}

template <class T>
std::vector<std::uint8_t> binarize(const Image2D<T>& img, ThresholdMode mode,
                                   double fixed_value) {
  const double t = mode == ThresholdMode::Fixed ? fixed_value
                                                : static_cast<double>(otsu_threshold(img));
  return apply_threshold(img, t);
}

}  // namespace voxmet
