#pragma once

// Slice-and-fuse: greedy association of per-slice 2D boxes into tracks
// across consecutive slices, then one 3D cuboid per surviving track.
//
// Association rule, applied per class in ascending slice order: each box
// links to the open track (same class, at most one box per track per
// slice) whose last box has maximal 2D IoU >= link_iou; ties prefer the
// higher track mean score, then the lower track start slice, then the
// older track. A track stays open through at most gap_tolerance empty
// slices; closed tracks spanning fewer than min_depth slices are dropped.

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "voxmet/annotations.hpp"
#include "voxmet/errors.hpp"
#include "voxmet/geometry.hpp"
#include "voxmet/metrics.hpp"
#include "voxmet/volume.hpp"

namespace voxmet {

struct FuserConfig {
  double link_iou = 0.3;  // in (0, 1]
  int gap_tolerance = 1;  // max consecutive empty slices inside a track
  int min_depth = 2;      // discard tracks spanning fewer slices
  enum class ScoreAggregation : std::uint8_t { Mean };
  ScoreAggregation score_aggregation = ScoreAggregation::Mean;

  void validate() const {
    if (!(link_iou > 0.0 && link_iou <= 1.0)) {
      throw MalformedDocument("link_iou must be in (0,1]");
    }
    if (min_depth < 1) throw MalformedDocument("min_depth must be >= 1");
    if (gap_tolerance < 0) throw MalformedDocument("gap_tolerance must be >= 0");
  }
};

namespace detail {

struct Track {
  int class_index;
  ScoredBox2D last_box;
  int first_slice;
  int last_slice;
  int extended_at;  // slice index of the most recent extension
  int member_count;
  double score_sum;
  int x_min, y_min, x_max, y_max;  // union footprint
  int id;

  double mean_score() const { return score_sum / member_count; }
};

}  // namespace detail

inline std::vector<Cuboid3D> fuse_tracks(const Detections2D& detections,
                                         const FuserConfig& cfg) {
  cfg.validate();
  if (detections.empty()) return {};
  const Axis axis = detections.front().axis;
  for (const auto& b : detections) {
    if (b.axis != axis) {
      throw MixedAxes("fuse_tracks: boxes from axes " + std::string(axis_name(axis)) +
                      " and " + axis_name(b.axis) + " in one call");
    }
    b.validate("fuse_tracks box");
  }

  // slice -> boxes, boxes within a slice in canonical detector order
  std::map<int, std::vector<ScoredBox2D>> by_slice;
  for (const auto& b : detections) by_slice[b.slice_index].push_back(b);
  for (auto& [s, boxes] : by_slice) {
    std::sort(boxes.begin(), boxes.end(), [](const ScoredBox2D& a, const ScoredBox2D& b) {
      if (a.score != b.score) return a.score > b.score;
      return box_order_2d(a, b);
    });
  }

  std::vector<detail::Track> open, closed;
  int next_id = 0;
  for (const auto& [slice_index, boxes] : by_slice) {
    // retire tracks whose gap just exceeded the tolerance
    std::vector<detail::Track> still_open;
    for (auto& t : open) {
      if (slice_index - t.last_slice - 1 > cfg.gap_tolerance) closed.push_back(t);
      else still_open.push_back(t);
    }
    open.swap(still_open);

    for (const auto& box : boxes) {
      detail::Track* best = nullptr;
      double best_iou = 0.0;
      for (auto& t : open) {
        if (t.class_index != box.class_index) continue;
        if (t.extended_at == slice_index) continue;  // one box per slice per track
        const double v = iou2d(t.last_box, box);
        if (v < cfg.link_iou) continue;
        if (!best || v > best_iou ||
            (v == best_iou && (t.mean_score() > best->mean_score() ||
                               (t.mean_score() == best->mean_score() &&
                                (t.first_slice < best->first_slice ||
                                 (t.first_slice == best->first_slice && t.id < best->id)))))) {
          best = &t;
          best_iou = v;
        }
      }
      if (best) {
        best->last_box = box;
        best->last_slice = slice_index;
        best->extended_at = slice_index;
        ++best->member_count;
        best->score_sum += box.score;
        best->x_min = std::min(best->x_min, box.x_min);
        best->y_min = std::min(best->y_min, box.y_min);
        best->x_max = std::max(best->x_max, box.x_max);
        best->y_max = std::max(best->y_max, box.y_max);
      } else {
        detail::Track t;
        t.class_index = box.class_index;
        t.last_box = box;
        t.first_slice = t.last_slice = t.extended_at = slice_index;
        t.member_count = 1;
        t.score_sum = box.score;
        t.x_min = box.x_min;
        t.y_min = box.y_min;
        t.x_max = box.x_max;
        t.y_max = box.y_max;
        t.id = next_id++;
        open.push_back(t);
      }
    }
  }
  closed.insert(closed.end(), open.begin(), open.end());

  std::vector<Cuboid3D> cuboids;
  for (const auto& t : closed) {
    const int span = t.last_slice - t.first_slice + 1;
    if (span < cfg.min_depth) continue;
    Cuboid3D c;
    c.class_index = t.class_index;
    c.x = t.x_min;
    c.y = t.y_min;
    c.z = t.first_slice;
    c.w = t.x_max - t.x_min + 1;
    c.h = t.y_max - t.y_min + 1;
    c.d = span;
    c.score = t.mean_score();
    cuboids.push_back(c);
  }
  std::sort(cuboids.begin(), cuboids.end(), [](const Cuboid3D& a, const Cuboid3D& b) {
    if (a.score != b.score) return a.score > b.score;
    return cuboid_order(a, b);
  });
  return cuboids;
}

// Verifies every cuboid fits in the volume, for downstream cropping.
inline std::vector<Cuboid3D> bind_volume(const std::vector<Cuboid3D>& cuboids, int nx, int ny,
                                         int nz) {
  for (std::size_t i = 0; i < cuboids.size(); ++i) {
    if (!cuboids[i].fits_in(nx, ny, nz)) {
      throw RoiOutOfBounds("cuboid[" + std::to_string(i) + "] exceeds volume bounds (" +
                           std::to_string(nx) + "," + std::to_string(ny) + "," +
                           std::to_string(nz) + ")");
    }
  }
  return cuboids;
}

template <class T>
std::vector<Cuboid3D> bind_volume(const std::vector<Cuboid3D>& cuboids, const Volume<T>& v) {
  return bind_volume(cuboids, v.nx, v.ny, v.nz);
}

}  // namespace voxmet
