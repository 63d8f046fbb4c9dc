#pragma once

// Binary morphology with square structuring elements on 2D masks.
//
// Border convention: erosion only tests in-bounds pixels (outside counts as
// foreground) and dilation only spreads from in-bounds pixels (outside
// counts as background). This pair is a proper adjunction on the finite
// pixel lattice, so open/close are genuine opening/closing there: masks
// that fill their frame and shapes flush against the ROI border survive
// opening intact, while isolated specks are still removed everywhere.

#include <algorithm>
#include <cstdint>
#include <vector>

namespace voxmet {

namespace detail {

// Separable sliding min (erode) / max (dilate) over a (2r+1)^2 window.
inline void window_pass(const std::uint8_t* in, std::uint8_t* out, int w, int h, int radius,
                        bool take_min, bool horizontal) {
  const int n_lines = horizontal ? h : w;
  const int len = horizontal ? w : h;
  for (int line = 0; line < n_lines; ++line) {
    for (int i = 0; i < len; ++i) {
      const int lo = std::max(0, i - radius);
      const int hi = std::min(len - 1, i + radius);
      std::uint8_t acc = take_min ? 1 : 0;
      for (int k = lo; k <= hi; ++k) {
        const std::size_t p = horizontal ? std::size_t(line) * w + k : std::size_t(k) * w + line;
        if (take_min) acc = std::min(acc, in[p]);
        else acc = std::max(acc, in[p]);
      }
      const std::size_t q = horizontal ? std::size_t(line) * w + i : std::size_t(i) * w + line;
      out[q] = acc;
    }
  }
}

inline std::vector<std::uint8_t> square_filter(const std::uint8_t* mask, int w, int h, int radius,
                                               bool take_min) {
  std::vector<std::uint8_t> tmp(std::size_t(w) * h), out(std::size_t(w) * h);
  window_pass(mask, tmp.data(), w, h, radius, take_min, true);
  window_pass(tmp.data(), out.data(), w, h, radius, take_min, false);
  return out;
}

}  // namespace detail

inline std::vector<std::uint8_t> erode(const std::uint8_t* mask, int w, int h, int radius = 1) {
  return detail::square_filter(mask, w, h, radius, true);
}

inline std::vector<std::uint8_t> dilate(const std::uint8_t* mask, int w, int h, int radius = 1) {
  return detail::square_filter(mask, w, h, radius, false);
}

inline std::vector<std::uint8_t> morph_open(const std::uint8_t* mask, int w, int h,
                                            int radius = 1) {
  const auto eroded = erode(mask, w, h, radius);
  return dilate(eroded.data(), w, h, radius);
}

inline std::vector<std::uint8_t> morph_close(const std::uint8_t* mask, int w, int h,
                                             int radius = 1) {
  const auto dilated = dilate(mask, w, h, radius);
  return erode(dilated.data(), w, h, radius);
}

}  // namespace voxmet
