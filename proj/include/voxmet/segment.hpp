#pragma once

// Binary ROI segmentation. The reference segmenter thresholds each slice
// and applies a 3x3 opening then closing; the open-close pair is an
// idempotent filter, so re-segmenting a binarized mask reproduces it.
// Externally produced per-view score volumes enter through import_scores
// and combine with the three-view average fusion.

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "voxmet/errors.hpp"
#include "voxmet/geometry.hpp"
#include "voxmet/morphology.hpp"
#include "voxmet/parallel.hpp"
#include "voxmet/threshold.hpp"
#include "voxmet/volume.hpp"
#include "voxmet/volume_io.hpp"

namespace voxmet {

struct SegmenterConfig {
  ThresholdMode threshold_mode = ThresholdMode::Otsu;
  double fixed_threshold = 0.0;
};

// Per-voxel scores in [0,1] for one viewing orientation.
struct ScoreVolume {
  int nx = 0, ny = 0, nz = 0;
  std::vector<float> scores;  // x fastest
  View view = View::Axial;

  std::size_t index(int x, int y, int z) const { return (std::size_t(z) * ny + y) * nx + x; }
  bool same_dims(const ScoreVolume& o) const { return nx == o.nx && ny == o.ny && nz == o.nz; }
};

namespace detail {

// Threshold + open + close on every slice along one axis, writing 0/1 bits
// back into volume coordinates.
template <class T>
void segment_slices(const Volume<T>& roi, const SegmenterConfig& cfg, Axis axis,
                    std::uint8_t* bits, int threads) {
  const int n = roi.extent(axis);
  parallel_for(n, threads, [&](std::int64_t s) {
    const Image2D<T> img = slice(roi, axis, static_cast<int>(s));
    auto mask = binarize(img, cfg.threshold_mode, cfg.fixed_threshold);
    mask = morph_open(mask.data(), img.w, img.h, 1);
    mask = morph_close(mask.data(), img.w, img.h, 1);
    for (int b = 0; b < img.h; ++b) {
      for (int a = 0; a < img.w; ++a) {
        const std::uint8_t bit = mask[std::size_t(b) * img.w + a];
        std::size_t p;
        switch (axis) {
          case Axis::Z: p = (std::size_t(s) * roi.ny + b) * roi.nx + a; break;
          case Axis::X: p = (std::size_t(b) * roi.ny + a) * roi.nx + std::size_t(s); break;
          default: p = (std::size_t(b) * roi.ny + std::size_t(s)) * roi.nx + a; break;
        }
        bits[p] = bit;
      }
    }
  });
}

}  // namespace detail

// Reference segmentation along axial slices.
template <class T>
Mask3D segment_roi(const Volume<T>& roi, const SegmenterConfig& cfg, int threads = 1) {
  Mask3D mask = Mask3D::create(roi.nx, roi.ny, roi.nz);
  detail::segment_slices(roi, cfg, Axis::Z, mask.bits.data(), threads);
  return mask;
}

// Reference segmentation along one view's slicing axis, as 0/1 scores.
template <class T>
ScoreVolume reference_scores(const Volume<T>& roi, const SegmenterConfig& cfg, View view,
                             int threads = 1) {
  std::vector<std::uint8_t> bits(roi.voxel_count(), 0);
  detail::segment_slices(roi, cfg, view_axis(view), bits.data(), threads);
  ScoreVolume sv;
  sv.nx = roi.nx;
  sv.ny = roi.ny;
  sv.nz = roi.nz;
  sv.view = view;
  sv.scores.assign(bits.begin(), bits.end());
  return sv;
}

// Per-voxel mean of the three views; foreground iff mean >= 0.5. The three
// scores are sorted before summing, so the result is exactly invariant
// under argument permutation.
inline Mask3D fuse_views(const ScoreVolume& a, const ScoreVolume& b, const ScoreVolume& c) {
  if (!a.same_dims(b) || !a.same_dims(c)) {
    throw DimMismatch("fuse_views: score volume dimensions differ");
  }
  if (a.view == b.view || a.view == c.view || b.view == c.view) {
    throw DuplicateView("fuse_views: views must be pairwise distinct");
  }
  Mask3D mask = Mask3D::create(a.nx, a.ny, a.nz);
  for (std::size_t i = 0; i < mask.bits.size(); ++i) {
    double s0 = a.scores[i], s1 = b.scores[i], s2 = c.scores[i];
    if (s0 > s1) std::swap(s0, s1);
    if (s1 > s2) std::swap(s1, s2);
    if (s0 > s1) std::swap(s0, s1);
    mask.bits[i] = (s0 + s1 + s2 >= 1.5) ? 1 : 0;
  }
  return mask;
}

// --- score volume I/O --------------------------------------------------------

inline void save_scores(const ScoreVolume& sv, const std::string& path) {
  VolumeF32 v = VolumeF32::create(sv.nx, sv.ny, sv.nz, Dec::from_int(1));
  v.data = sv.scores;
  save_volume(v, path);
}

inline ScoreVolume import_scores(const std::string& path, View view) {
  const VolumeF32 v = load_volume_as<float>(path);
  for (std::size_t i = 0; i < v.data.size(); ++i) {
    const float s = v.data[i];
    if (!(s >= 0.0f && s <= 1.0f)) {
      throw ScoreOutOfRange(path + ": score " + std::to_string(s) + " at voxel " +
                            std::to_string(i) + " outside [0,1]");
    }
  }
  ScoreVolume sv;
  sv.nx = v.nx;
  sv.ny = v.ny;
  sv.nz = v.nz;
  sv.view = view;
  sv.scores = v.data;
  return sv;
}

}  // namespace voxmet
