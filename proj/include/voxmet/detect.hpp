#pragma once

// Reference per-slice 2D object detector: threshold, connected components,
// area filter, one tight box per surviving component. Stands in for a
// learned slice detector; externally produced detections enter through
// load_detections_2d instead.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "voxmet/annotations.hpp"
#include "voxmet/errors.hpp"
#include "voxmet/geometry.hpp"
#include "voxmet/labeling.hpp"
#include "voxmet/parallel.hpp"
#include "voxmet/threshold.hpp"
#include "voxmet/volume.hpp"

namespace voxmet {

struct DetectorConfig {
  ThresholdMode threshold_mode = ThresholdMode::Otsu;
  double fixed_threshold = 0.0;  // used when threshold_mode == Fixed
  int connectivity = 8;          // diagonal boundaries fragment under 4
  int min_area = 1;
  enum class ScoreMode : std::uint8_t { Contrast, ConstantOne };
  ScoreMode score_mode = ScoreMode::Contrast;
  int class_index = 0;  // single-class runs; stamped on every box

  void validate() const {
    if (min_area < 1) throw MalformedDocument("min_area must be >= 1");
    if (connectivity != 4 && connectivity != 8) {
      throw MalformedDocument("connectivity must be 4 or 8");
    }
  }
};

// One box per connected foreground component with area >= min_area, sorted
// by descending score, ties by ascending box coordinates. Contrast score =
// (mean component intensity - mean background intensity) / dynamic range,
// clamped to [0,1]; background = the below-threshold pixels of the slice
// (mean 0 when nothing is below threshold).
template <class T>
std::vector<ScoredBox2D> detect_slice(const Image2D<T>& img, const DetectorConfig& cfg) {
  static_assert(std::is_integral_v<T>, "reference detector operates on integer images");
  cfg.validate();
  if (img.w < 1 || img.h < 1) throw MalformedDocument("detect_slice: empty image");

  const auto mask = binarize(img, cfg.threshold_mode, cfg.fixed_threshold);
  const Components comps = connected_components(mask.data(), img.w, img.h, cfg.connectivity);

  double background_mean = 0.0;
  if (cfg.score_mode == DetectorConfig::ScoreMode::Contrast) {
    double bg_sum = 0.0;
    std::int64_t bg_count = 0;
    for (std::size_t i = 0; i < mask.size(); ++i) {
      if (!mask[i]) {
        bg_sum += static_cast<double>(img.data[i]);
        ++bg_count;
      }
    }
    if (bg_count > 0) background_mean = bg_sum / static_cast<double>(bg_count);
  }

  std::vector<double> comp_sum(comps.stats.size(), 0.0);
  if (cfg.score_mode == DetectorConfig::ScoreMode::Contrast) {
    for (std::size_t i = 0; i < mask.size(); ++i) {
      const std::int32_t label = comps.labels[i];
      if (label > 0) comp_sum[static_cast<std::size_t>(label - 1)] += double(img.data[i]);
    }
  }

  constexpr double range = static_cast<double>(std::numeric_limits<T>::max());
  std::vector<ScoredBox2D> boxes;
  for (const auto& st : comps.stats) {
    if (st.area < cfg.min_area) continue;
    ScoredBox2D b;
    b.class_index = cfg.class_index;
    b.x_min = st.x_min;
    b.y_min = st.y_min;
    b.x_max = st.x_max;
    b.y_max = st.y_max;
    if (cfg.score_mode == DetectorConfig::ScoreMode::ConstantOne) {
      b.score = 1.0;
    } else {
      const double comp_mean =
          comp_sum[static_cast<std::size_t>(st.label - 1)] / static_cast<double>(st.area);
      b.score = std::clamp((comp_mean - background_mean) / range, 0.0, 1.0);
    }
    if (img.provenance) {
      b.axis = img.provenance->axis;
      b.slice_index = img.provenance->slice_index;
    }
    boxes.push_back(b);
  }
  std::sort(boxes.begin(), boxes.end(), [](const ScoredBox2D& a, const ScoredBox2D& b) {
    if (a.score != b.score) return a.score > b.score;
    return box_order_2d(a, b);
  });
  return boxes;
}

// detect_slice over every slice along `axis`. Slices process independently
// (optionally in parallel); assembly is in ascending slice order, so the
// result never depends on the thread count.
template <class T>
Detections2D detect_volume(const Volume<T>& v, Axis axis, const DetectorConfig& cfg,
                           int threads = 1) {
  cfg.validate();
  const int n = v.extent(axis);
  std::vector<std::vector<ScoredBox2D>> per_slice(static_cast<std::size_t>(n));
  parallel_for(n, threads, [&](std::int64_t i) {
    per_slice[static_cast<std::size_t>(i)] =
        detect_slice(slice(v, axis, static_cast<int>(i)), cfg);
  });
  Detections2D out;
  for (auto& boxes : per_slice) {
    out.insert(out.end(), boxes.begin(), boxes.end());
  }
  return out;
}

}  // namespace voxmet
