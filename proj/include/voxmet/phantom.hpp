#pragma once

// Synthetic test-vehicle generator. Scenes are rasterized analytically with
// a voxel-center inside test, which makes the ground truth exact: a voxel
// belongs to a primitive iff its center lies inside the solid, and the
// ground-truth box is the componentwise min/max of those voxels.
//
// Coordinate convention: voxel (i,j,k) has its center at continuous
// coordinates (i,j,k). Intervals of integer length are half-open
// [c - s/2, c + s/2) so an integer size always rasterizes to exactly that
// many voxels; radial tests are closed (<= r^2).
//
// Solids:
//   cylinder      axis along z, closed disk of `radius`, z in
//                 [cz - depth/2, cz + depth/2)
//   capped_pillar cylinder shaft as above plus the upper half-ball of the
//                 same radius centered on the shaft top (cx, cy, cz + depth/2)
//   box           axis-aligned, half-open intervals of sizes (w, h, d)
//
// Voxels covered by primitives of different classes resolve to the highest
// intensity; primitives of one class must not overlap.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "voxmet/annotations.hpp"
#include "voxmet/decimal.hpp"
#include "voxmet/errors.hpp"
#include "voxmet/geometry.hpp"
#include "voxmet/parallel.hpp"
#include "voxmet/rng.hpp"
#include "voxmet/volume.hpp"

namespace voxmet {

enum class PrimitiveKind : std::uint8_t { Cylinder, CappedPillar, Box };

inline const char* primitive_kind_name(PrimitiveKind k) {
  switch (k) {
    case PrimitiveKind::Cylinder: return "cylinder";
    case PrimitiveKind::CappedPillar: return "capped_pillar";
    default: return "box";
  }
}

struct PrimitiveSpec {
  PrimitiveKind kind = PrimitiveKind::Cylinder;
  int class_index = 0;
  double cx = 0, cy = 0, cz = 0;
  double radius = 0;             // cylinder, capped_pillar
  double depth = 0;              // cylinder z extent / capped_pillar shaft depth
  double box_w = 0, box_h = 0, box_d = 0;  // box
  double intensity = 0;
};

struct SceneSpec {
  int nx = 0, ny = 0, nz = 0;
  Dec voxel_size_um = Dec::parse("0.7");
  Dtype dtype = Dtype::U8;
  double background = 0;
  std::vector<std::string> classes;
  std::vector<PrimitiveSpec> primitives;
  std::uint64_t rng_seed = 0;

  int class_count() const {
    int n = static_cast<int>(classes.size());
    for (const auto& p : primitives) n = std::max(n, p.class_index + 1);
    return n;
  }

  // Class names for emitted ground truth; unnamed indices get class_<k>.
  std::vector<std::string> class_names() const {
    std::vector<std::string> names = classes;
    for (int k = static_cast<int>(names.size()); k < class_count(); ++k) {
      names.push_back("class_" + std::to_string(k));
    }
    return names;
  }
};

// --- analytic membership --------------------------------------------------

inline bool primitive_contains(const PrimitiveSpec& p, int i, int j, int k) {
  const double dx = i - p.cx, dy = j - p.cy;
  switch (p.kind) {
    case PrimitiveKind::Cylinder: {
      if (dx * dx + dy * dy > p.radius * p.radius) return false;
      return k >= p.cz - p.depth / 2 && k < p.cz + p.depth / 2;
    }
    case PrimitiveKind::CappedPillar: {
      const double top = p.cz + p.depth / 2;
      if (k >= p.cz - p.depth / 2 && k < top) {
        return dx * dx + dy * dy <= p.radius * p.radius;
      }
      if (k >= top) {
        const double dz = k - top;
        return dx * dx + dy * dy + dz * dz <= p.radius * p.radius;
      }
      return false;
    }
    default: {
      return i >= p.cx - p.box_w / 2 && i < p.cx + p.box_w / 2 &&
             j >= p.cy - p.box_h / 2 && j < p.cy + p.box_h / 2 &&
             k >= p.cz - p.box_d / 2 && k < p.cz + p.box_d / 2;
    }
  }
}

namespace detail {

inline int first_at_least(double bound) { return static_cast<int>(std::ceil(bound)); }
inline int last_at_most(double bound) { return static_cast<int>(std::floor(bound)); }
inline int last_below(double bound) { return static_cast<int>(std::ceil(bound)) - 1; }

}  // namespace detail

// Tight integer bounds on voxel centers the solid can contain.
struct IntBounds {
  int x0, x1, y0, y1, z0, z1;
};

inline IntBounds primitive_reach(const PrimitiveSpec& p) {
  using namespace detail;
  IntBounds b{};
  switch (p.kind) {
    case PrimitiveKind::Cylinder:
      b.x0 = first_at_least(p.cx - p.radius);
      b.x1 = last_at_most(p.cx + p.radius);
      b.y0 = first_at_least(p.cy - p.radius);
      b.y1 = last_at_most(p.cy + p.radius);
      b.z0 = first_at_least(p.cz - p.depth / 2);
      b.z1 = last_below(p.cz + p.depth / 2);
      break;
    case PrimitiveKind::CappedPillar:
      b.x0 = first_at_least(p.cx - p.radius);
      b.x1 = last_at_most(p.cx + p.radius);
      b.y0 = first_at_least(p.cy - p.radius);
      b.y1 = last_at_most(p.cy + p.radius);
      b.z0 = first_at_least(p.cz - p.depth / 2);
      b.z1 = last_at_most(p.cz + p.depth / 2 + p.radius);
      break;
    default:
      b.x0 = first_at_least(p.cx - p.box_w / 2);
      b.x1 = last_below(p.cx + p.box_w / 2);
      b.y0 = first_at_least(p.cy - p.box_h / 2);
      b.y1 = last_below(p.cy + p.box_h / 2);
      b.z0 = first_at_least(p.cz - p.box_d / 2);
      b.z1 = last_below(p.cz + p.box_d / 2);
      break;
  }
  return b;
}

template <class T>
struct Scene {
  Volume<T> volume;
  GroundTruth gt;                 // boxes in primitive order; mask_refs filled on save
  std::vector<Mask3D> class_masks;  // one exact mask per class
};

namespace detail {

inline void validate_primitive(const PrimitiveSpec& p, const SceneSpec& spec, int index) {
  const std::string ctx = "primitive[" + std::to_string(index) + "]";
  const double max_intensity =
      spec.dtype == Dtype::U8 ? 255.0 : spec.dtype == Dtype::U16le ? 65535.0 : 1.0;
  if (p.class_index < 0) throw MalformedDocument(ctx + ": negative class index");
  if (p.kind != PrimitiveKind::Box) {
    if (p.radius <= 0) throw MalformedDocument(ctx + ": radius must be > 0");
    if (p.depth < 1) throw MalformedDocument(ctx + ": depth must be >= 1");
  } else {
    if (p.box_w < 1 || p.box_h < 1 || p.box_d < 1) {
      throw MalformedDocument(ctx + ": box sizes must be >= 1");
    }
  }
  if (p.intensity <= spec.background) {
    throw MalformedDocument(ctx + ": intensity must exceed background");
  }
  if (p.intensity < 0 || p.intensity > max_intensity) {
    throw MalformedDocument(ctx + ": intensity outside dtype range");
  }
  const IntBounds b = primitive_reach(p);
  if (b.x0 < 0 || b.y0 < 0 || b.z0 < 0 || b.x1 >= spec.nx || b.y1 >= spec.ny ||
      b.z1 >= spec.nz) {
    throw PrimitiveOutOfBounds(ctx + " extends outside the volume");
  }
  if (b.x0 > b.x1 || b.y0 > b.y1 || b.z0 > b.z1) {
    throw PrimitiveOutOfBounds(ctx + " rasterizes to no voxels");
  }
}

struct RasterizedPrimitive {
  IntBounds bounds;                // loop bounds used for local storage
  Cuboid3D tight;                  // actual voxel bounding box
  std::vector<std::uint8_t> local; // membership over `bounds`, x fastest
  bool empty = true;
};

inline RasterizedPrimitive rasterize_primitive(const PrimitiveSpec& p, int index) {
  RasterizedPrimitive r;
  r.bounds = primitive_reach(p);
  const auto& b = r.bounds;
  const int lw = b.x1 - b.x0 + 1, lh = b.y1 - b.y0 + 1, ld = b.z1 - b.z0 + 1;
  r.local.assign(std::size_t(lw) * lh * ld, 0);
  int x0 = INT32_MAX, y0 = INT32_MAX, z0 = INT32_MAX, x1 = -1, y1 = -1, z1 = -1;
  std::size_t pos = 0;
  for (int k = b.z0; k <= b.z1; ++k) {
    for (int j = b.y0; j <= b.y1; ++j) {
      for (int i = b.x0; i <= b.x1; ++i, ++pos) {
        if (!primitive_contains(p, i, j, k)) continue;
        r.local[pos] = 1;
        x0 = std::min(x0, i); x1 = std::max(x1, i);
        y0 = std::min(y0, j); y1 = std::max(y1, j);
        z0 = std::min(z0, k); z1 = std::max(z1, k);
      }
    }
  }
  if (x1 < 0) {
    throw PrimitiveOutOfBounds("primitive[" + std::to_string(index) +
                               "] rasterizes to no voxels");
  }
  r.empty = false;
  r.tight = Cuboid3D{p.class_index, x0, y0, z0, x1 - x0 + 1, y1 - y0 + 1, z1 - z0 + 1, 1.0};
  return r;
}

}  // namespace detail

// Deterministic for a given spec: rasterization runs per primitive (optionally
// in parallel) and composition is an order-independent max reduction.
template <class T>
Scene<T> generate_scene(const SceneSpec& spec, int threads = 1) {
  static_assert(std::is_integral_v<T>, "scenes rasterize to integer volumes");
  if (dtype_of<T>::value != spec.dtype) throw MalformedDocument("scene dtype mismatch");
  const int n = static_cast<int>(spec.primitives.size());
  for (int i = 0; i < n; ++i) detail::validate_primitive(spec.primitives[i], spec, i);

  std::vector<detail::RasterizedPrimitive> rastered(static_cast<std::size_t>(n));
  parallel_for(n, threads, [&](std::int64_t i) {
    rastered[static_cast<std::size_t>(i)] =
        detail::rasterize_primitive(spec.primitives[static_cast<std::size_t>(i)],
                                    static_cast<int>(i));
  });

  Scene<T> scene;
  scene.volume = Volume<T>::create(spec.nx, spec.ny, spec.nz, spec.voxel_size_um,
                                   static_cast<T>(std::llround(spec.background)));
  const int n_classes = spec.class_count();
  scene.class_masks.reserve(static_cast<std::size_t>(n_classes));
  for (int c = 0; c < n_classes; ++c) {
    scene.class_masks.push_back(Mask3D::create(spec.nx, spec.ny, spec.nz));
  }
  scene.gt.volume_id = "scene";
  scene.gt.classes = spec.class_names();

  for (int i = 0; i < n; ++i) {
    const auto& p = spec.primitives[static_cast<std::size_t>(i)];
    const auto& r = rastered[static_cast<std::size_t>(i)];
    Mask3D& cmask = scene.class_masks[static_cast<std::size_t>(p.class_index)];
    const T value = static_cast<T>(std::llround(p.intensity));
    const auto& b = r.bounds;
    const int lw = b.x1 - b.x0 + 1, lh = b.y1 - b.y0 + 1;
    std::size_t pos = 0;
    for (int k = b.z0; k <= b.z1; ++k) {
      for (int j = b.y0; j <= b.y1; ++j) {
        for (int i2 = b.x0; i2 <= b.x1; ++i2, ++pos) {
          if (!r.local[pos]) continue;
          const std::size_t v = scene.volume.index(i2, j, k);
          if (cmask.bits[v]) {
            throw OverlappingPrimitives("primitive[" + std::to_string(i) +
                                        "] overlaps an earlier primitive of class " +
                                        std::to_string(p.class_index));
          }
          cmask.bits[v] = 1;
          scene.volume.data[v] = std::max(scene.volume.data[v], value);
        }
      }
    }
    (void)lw; (void)lh;
    scene.gt.boxes.push_back(r.tight);
  }
  return scene;
}

// Exact per-slice 2D boxes of every primitive along `axis`, score 1.0:
// the output an ideal slice detector would produce. Boxes are emitted in
// ascending slice order, canonical box order within a slice.
inline Detections2D oracle_slice_boxes(const SceneSpec& spec, Axis axis) {
  Detections2D out;
  for (const auto& p : spec.primitives) {
    const IntBounds b = primitive_reach(p);
    int s0, s1;
    switch (axis) {
      case Axis::X: s0 = b.x0; s1 = b.x1; break;
      case Axis::Y: s0 = b.y0; s1 = b.y1; break;
      default: s0 = b.z0; s1 = b.z1; break;
    }
    for (int s = s0; s <= s1; ++s) {
      int a0 = INT32_MAX, b0 = INT32_MAX, a1 = -1, b1 = -1;
      for (int k = b.z0; k <= b.z1; ++k) {
        for (int j = b.y0; j <= b.y1; ++j) {
          for (int i = b.x0; i <= b.x1; ++i) {
            int sa, sb, ss;
            switch (axis) {
              case Axis::X: ss = i; sa = j; sb = k; break;
              case Axis::Y: ss = j; sa = i; sb = k; break;
              default: ss = k; sa = i; sb = j; break;
            }
            if (ss != s || !primitive_contains(p, i, j, k)) continue;
            a0 = std::min(a0, sa); a1 = std::max(a1, sa);
            b0 = std::min(b0, sb); b1 = std::max(b1, sb);
          }
        }
      }
      if (a1 < 0) continue;
      ScoredBox2D box;
      box.class_index = p.class_index;
      box.x_min = a0; box.x_max = a1;
      box.y_min = b0; box.y_max = b1;
      box.score = 1.0;
      box.axis = axis;
      box.slice_index = s;
      out.push_back(box);
    }
  }
  std::sort(out.begin(), out.end(), [](const ScoredBox2D& a, const ScoredBox2D& b) {
    if (a.slice_index != b.slice_index) return a.slice_index < b.slice_index;
    return box_order_2d(a, b);
  });
  return out;
}

// --- noise model -----------------------------------------------------------

// Normalized box blur (window mean over the in-bounds neighborhood), then
// additive Gaussian noise scaled by `sigma` * dynamic range, clamped to the
// dtype range. Pure function of (volume, sigma, blur_radius, seed).
template <class T>
Volume<T> add_noise(const Volume<T>& v, double sigma, int blur_radius, std::uint64_t seed,
                    int threads = 1) {
  static_assert(std::is_integral_v<T>, "noise applies to integer volumes");
  if (sigma < 0) throw MalformedDocument("noise sigma must be >= 0");
  if (blur_radius < 0) throw MalformedDocument("blur radius must be >= 0");
  if (sigma == 0 && blur_radius == 0) return v;

  const double range = static_cast<double>(std::numeric_limits<T>::max());
  std::vector<double> field(v.data.begin(), v.data.end());

  if (blur_radius > 0) {
    const int r = blur_radius;
    std::vector<double> tmp(field.size());
    // x pass: one line per (y,z)
    parallel_for(std::int64_t(v.ny) * v.nz, threads, [&](std::int64_t line) {
      const int y = static_cast<int>(line % v.ny), z = static_cast<int>(line / v.ny);
      const std::size_t base = v.index(0, y, z);
      for (int x = 0; x < v.nx; ++x) {
        const int lo = std::max(0, x - r), hi = std::min(v.nx - 1, x + r);
        double s = 0;
        for (int k = lo; k <= hi; ++k) s += field[base + k];
        tmp[base + x] = s / (hi - lo + 1);
      }
    });
    // y pass: one line per (x,z)
    parallel_for(std::int64_t(v.nx) * v.nz, threads, [&](std::int64_t line) {
      const int x = static_cast<int>(line % v.nx), z = static_cast<int>(line / v.nx);
      for (int y = 0; y < v.ny; ++y) {
        const int lo = std::max(0, y - r), hi = std::min(v.ny - 1, y + r);
        double s = 0;
        for (int k = lo; k <= hi; ++k) s += tmp[v.index(x, k, z)];
        field[v.index(x, y, z)] = s / (hi - lo + 1);
      }
    });
    // z pass: one line per (x,y)
    parallel_for(std::int64_t(v.nx) * v.ny, threads, [&](std::int64_t line) {
      const int x = static_cast<int>(line % v.nx), y = static_cast<int>(line / v.nx);
      for (int z = 0; z < v.nz; ++z) {
        const int lo = std::max(0, z - r), hi = std::min(v.nz - 1, z + r);
        double s = 0;
        for (int k = lo; k <= hi; ++k) s += field[v.index(x, y, k)];
        tmp[v.index(x, y, z)] = s / (hi - lo + 1);
      }
    });
    field.swap(tmp);
  }

  Volume<T> out = Volume<T>::create(v.nx, v.ny, v.nz, v.voxel_size_um);
  parallel_for(static_cast<std::int64_t>(field.size()), threads, [&](std::int64_t i) {
    double value = field[static_cast<std::size_t>(i)];
    if (sigma > 0) {
      value += gaussian_at(seed, static_cast<std::uint64_t>(i)) * sigma * range;
    }
    value = std::clamp(value, 0.0, range);
    out.data[static_cast<std::size_t>(i)] = static_cast<T>(std::llround(value));
  });
  return out;
}

// --- scene spec JSON --------------------------------------------------------

inline SceneSpec load_scene_spec(const std::string& path) {
  const nlohmann::json j = detail::parse_json_file(path);
  if (!j.is_object()) throw MalformedDocument(path + ": not a JSON object");
  SceneSpec spec;
  spec.nx = detail::require_int(j, "nx", path);
  spec.ny = detail::require_int(j, "ny", path);
  spec.nz = detail::require_int(j, "nz", path);
  if (spec.nx < 1 || spec.ny < 1 || spec.nz < 1) {
    throw MalformedDocument(path + ": dims must be >= 1");
  }
  if (j.contains("voxel_size_um")) {
    const auto& pv = j["voxel_size_um"];
    try {
      spec.voxel_size_um = pv.is_string() ? Dec::parse(pv.get<std::string>())
                                          : Dec::from_double(pv.get<double>());
    } catch (const std::exception&) {
      throw MalformedDocument(path + ": bad voxel_size_um");
    }
    if (!(spec.voxel_size_um > Dec())) throw MalformedDocument(path + ": voxel_size_um must be > 0");
  }
  if (j.contains("dtype")) {
    const std::string dt = j["dtype"].get<std::string>();
    if (dt == "u8") spec.dtype = Dtype::U8;
    else if (dt == "u16le") spec.dtype = Dtype::U16le;
    else throw MalformedDocument(path + ": scene dtype must be u8 or u16le");
  }
  spec.background = j.contains("background") ? detail::require_number(j, "background", path) : 0.0;
  if (j.contains("classes")) {
    for (const auto& c : j["classes"]) spec.classes.push_back(c.get<std::string>());
  }
  if (j.contains("rng_seed")) {
    if (!j["rng_seed"].is_number_integer() && !j["rng_seed"].is_number_unsigned()) {
      throw MalformedDocument(path + ": rng_seed must be an integer");
    }
    spec.rng_seed = j["rng_seed"].get<std::uint64_t>();
  }
  if (!j.contains("primitives") || !j["primitives"].is_array()) {
    throw MalformedDocument(path + ": missing 'primitives' array");
  }
  int idx = 0;
  for (const auto& jp : j["primitives"]) {
    const std::string ctx = path + ": primitives[" + std::to_string(idx) + "]";
    PrimitiveSpec p;
    const std::string kind = detail::require_string(jp, "kind", ctx);
    if (kind == "cylinder") p.kind = PrimitiveKind::Cylinder;
    else if (kind == "capped_pillar") p.kind = PrimitiveKind::CappedPillar;
    else if (kind == "box") p.kind = PrimitiveKind::Box;
    else throw MalformedDocument(ctx + ": unknown kind '" + kind + "'");
    p.class_index = detail::require_int(jp, "class", ctx);
    p.cx = detail::require_number(jp, "cx", ctx);
    p.cy = detail::require_number(jp, "cy", ctx);
    p.cz = detail::require_number(jp, "cz", ctx);
    if (p.kind == PrimitiveKind::Box) {
      p.box_w = detail::require_number(jp, "w", ctx);
      p.box_h = detail::require_number(jp, "h", ctx);
      p.box_d = detail::require_number(jp, "d", ctx);
    } else {
      p.radius = detail::require_number(jp, "radius", ctx);
      p.depth = detail::require_number(jp, "depth", ctx);
    }
    p.intensity = detail::require_number(jp, "intensity", ctx);
    spec.primitives.push_back(p);
    ++idx;
  }
  return spec;
}

inline void save_scene_spec(const SceneSpec& spec, const std::string& path) {
  nlohmann::json j;
  j["nx"] = spec.nx;
  j["ny"] = spec.ny;
  j["nz"] = spec.nz;
  j["voxel_size_um"] = spec.voxel_size_um.str();
  j["dtype"] = dtype_name(spec.dtype);
  j["background"] = spec.background;
  j["classes"] = spec.classes;
  j["rng_seed"] = spec.rng_seed;
  j["primitives"] = nlohmann::json::array();
  for (const auto& p : spec.primitives) {
    nlohmann::json jp{{"kind", primitive_kind_name(p.kind)},
                      {"class", p.class_index},
                      {"cx", p.cx},
                      {"cy", p.cy},
                      {"cz", p.cz},
                      {"intensity", p.intensity}};
    if (p.kind == PrimitiveKind::Box) {
      jp["w"] = p.box_w;
      jp["h"] = p.box_h;
      jp["d"] = p.box_d;
    } else {
      jp["radius"] = p.radius;
      jp["depth"] = p.depth;
    }
    j["primitives"].push_back(jp);
  }
  detail::write_json_file(j, path);
}

}  // namespace voxmet
