#pragma once

// Shared geometric vocabulary. All boxes are axis-aligned with inclusive
// integer extents: (x, y[, z]) is the first covered voxel and (w, h[, d])
// count covered voxels, so the last covered voxel along x is x + w - 1.

#include <cstdint>
#include <string>
#include <tuple>

#include "voxmet/errors.hpp"

namespace voxmet {

enum class Axis : std::uint8_t { X = 0, Y = 1, Z = 2 };

inline const char* axis_name(Axis a) {
  switch (a) {
    case Axis::X: return "x";
    case Axis::Y: return "y";
    default: return "z";
  }
}

inline Axis parse_axis(const std::string& s) {
  if (s == "x") return Axis::X;
  if (s == "y") return Axis::Y;
  if (s == "z") return Axis::Z;
  throw MalformedDocument("unknown axis: " + s);
}

// Orthogonal viewing orientations; each one slices along a fixed axis.
enum class View : std::uint8_t { Axial = 0, Sagittal = 1, Coronal = 2 };

inline Axis view_axis(View v) {
  switch (v) {
    case View::Axial: return Axis::Z;
    case View::Sagittal: return Axis::X;
    default: return Axis::Y;
  }
}

inline const char* view_name(View v) {
  switch (v) {
    case View::Axial: return "axial";
    case View::Sagittal: return "sagittal";
    default: return "coronal";
  }
}

inline View parse_view(const std::string& s) {
  if (s == "axial") return View::Axial;
  if (s == "sagittal") return View::Sagittal;
  if (s == "coronal") return View::Coronal;
  throw MalformedDocument("unknown view: " + s);
}

struct Rect2D {
  int x = 0, y = 0;
  int w = 1, h = 1;  // inclusive extents, >= 1

  int x_max() const { return x + w - 1; }
  int y_max() const { return y + h - 1; }
  bool operator==(const Rect2D&) const = default;
};

// One per-slice detection. Bounds are inclusive pixel indices.
struct ScoredBox2D {
  int class_index = 0;
  int x_min = 0, y_min = 0, x_max = 0, y_max = 0;
  double score = 1.0;
  Axis axis = Axis::Z;
  int slice_index = 0;

  int width() const { return x_max - x_min + 1; }
  int height() const { return y_max - y_min + 1; }
  std::int64_t area() const { return std::int64_t(width()) * height(); }
  bool operator==(const ScoredBox2D&) const = default;

  void validate(const char* what = "box") const {
    if (x_min > x_max || y_min > y_max) {
      throw InvalidBox(std::string(what) + ": empty bounds");
    }
    if (x_min < 0 || y_min < 0) throw InvalidBox(std::string(what) + ": negative origin");
    if (score < 0.0 || score > 1.0) throw InvalidBox(std::string(what) + ": score outside [0,1]");
    if (slice_index < 0) throw InvalidBox(std::string(what) + ": negative slice index");
  }
};

struct Cuboid3D {
  int class_index = 0;
  int x = 0, y = 0, z = 0;
  int w = 1, h = 1, d = 1;  // inclusive extents, >= 1
  double score = 1.0;

  int x_max() const { return x + w - 1; }
  int y_max() const { return y + h - 1; }
  int z_max() const { return z + d - 1; }
  std::int64_t volume() const { return std::int64_t(w) * h * d; }
  bool operator==(const Cuboid3D&) const = default;

  bool fits_in(int nx, int ny, int nz) const {
    return x >= 0 && y >= 0 && z >= 0 && w >= 1 && h >= 1 && d >= 1 &&
           x + w <= nx && y + h <= ny && z + d <= nz;
  }

  void validate(const char* what = "cuboid") const {
    if (w < 1 || h < 1 || d < 1) throw InvalidBox(std::string(what) + ": extents must be >= 1");
    if (x < 0 || y < 0 || z < 0) throw InvalidBox(std::string(what) + ": negative origin");
    if (score < 0.0 || score > 1.0) throw InvalidBox(std::string(what) + ": score outside [0,1]");
  }
};

// Canonical orderings used wherever a deterministic sequence is required
// (greedy matching, serialization, tie-breaking).
inline bool box_order_2d(const ScoredBox2D& a, const ScoredBox2D& b) {
  return std::tie(a.x_min, a.y_min, a.x_max, a.y_max, a.slice_index, a.class_index) <
         std::tie(b.x_min, b.y_min, b.x_max, b.y_max, b.slice_index, b.class_index);
}

inline bool cuboid_order(const Cuboid3D& a, const Cuboid3D& b) {
  return std::tie(a.z, a.x, a.y, a.w, a.h, a.d, a.class_index) <
         std::tie(b.z, b.x, b.y, b.w, b.h, b.d, b.class_index);
}

}  // namespace voxmet
