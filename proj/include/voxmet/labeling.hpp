#pragma once

// Connected component labeling for 2D binary masks. Labels are assigned in
// raster-scan first-encounter order starting at 1, so the labeling is a
// deterministic function of the mask.

#include <cstdint>
#include <vector>

#include "voxmet/errors.hpp"
#include "voxmet/geometry.hpp"

namespace voxmet {

struct ComponentStats {
  std::int32_t label = 0;
  std::int64_t area = 0;
  int x_min = 0, y_min = 0, x_max = 0, y_max = 0;
  // anchor = lexicographically smallest (y,x) pixel of the component
  int anchor_x = 0, anchor_y = 0;
};

struct Components {
  std::vector<std::int32_t> labels;  // 0 = background
  std::vector<ComponentStats> stats; // stats[k] describes label k+1
};

inline Components connected_components(const std::uint8_t* mask, int w, int h,
                                       int connectivity) {
  if (connectivity != 4 && connectivity != 8) {
    throw MalformedDocument("connectivity must be 4 or 8");
  }
  Components out;
  out.labels.assign(std::size_t(w) * h, 0);

  static constexpr int dx8[8] = {1, -1, 0, 0, 1, 1, -1, -1};
  static constexpr int dy8[8] = {0, 0, 1, -1, 1, -1, 1, -1};
  const int n_nbr = connectivity == 4 ? 4 : 8;

  std::vector<std::int32_t> queue;
  std::int32_t next_label = 1;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t p = std::size_t(y) * w + x;
      if (!mask[p] || out.labels[p]) continue;

      ComponentStats st;
      st.label = next_label;
      st.x_min = st.x_max = st.anchor_x = x;
      st.y_min = st.y_max = st.anchor_y = y;

      queue.clear();
      queue.push_back(static_cast<std::int32_t>(p));
      out.labels[p] = next_label;
      while (!queue.empty()) {
        const std::int32_t q = queue.back();
        queue.pop_back();
        const int qx = q % w, qy = q / w;
        ++st.area;
        if (qx < st.x_min) st.x_min = qx;
        if (qx > st.x_max) st.x_max = qx;
        if (qy < st.y_min) st.y_min = qy;
        if (qy > st.y_max) st.y_max = qy;
        for (int k = 0; k < n_nbr; ++k) {
          const int nx = qx + dx8[k], ny = qy + dy8[k];
          if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
          const std::size_t np = std::size_t(ny) * w + nx;
          if (mask[np] && !out.labels[np]) {
            out.labels[np] = next_label;
            queue.push_back(static_cast<std::int32_t>(np));
          }
        }
      }
      out.stats.push_back(st);
      ++next_label;
    }
  }
  return out;
}

// Largest component by area; ties broken by smallest (y,x) anchor, which is
// the first-encountered component in scan order.
inline const ComponentStats* largest_component(const Components& comps) {
  const ComponentStats* best = nullptr;
  for (const auto& st : comps.stats) {
    if (!best || st.area > best->area) best = &st;
  }
  return best;
}

}  // namespace voxmet
