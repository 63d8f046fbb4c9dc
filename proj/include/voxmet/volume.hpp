#pragma once

// Voxel containers. A Volume is an immutable-by-convention dense 3D grid
// with x-fastest storage: index(x,y,z) = z*ny*nx + y*nx + x. Every
// operation here is pure and returns a new value, so shared volumes are
// safe to read concurrently.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "voxmet/decimal.hpp"
#include "voxmet/errors.hpp"
#include "voxmet/geometry.hpp"

namespace voxmet {

enum class Dtype : std::uint8_t { U8, U16le, F32le };

inline const char* dtype_name(Dtype t) {
  switch (t) {
    case Dtype::U8: return "u8";
    case Dtype::U16le: return "u16le";
    default: return "f32le";
  }
}

inline std::size_t dtype_size(Dtype t) { return t == Dtype::U8 ? 1 : t == Dtype::U16le ? 2 : 4; }

template <class T>
struct dtype_of;
template <>
struct dtype_of<std::uint8_t> { static constexpr Dtype value = Dtype::U8; };
template <>
struct dtype_of<std::uint16_t> { static constexpr Dtype value = Dtype::U16le; };
template <>
struct dtype_of<float> { static constexpr Dtype value = Dtype::F32le; };

struct SliceProvenance {
  Axis axis = Axis::Z;
  int slice_index = 0;
  bool operator==(const SliceProvenance&) const = default;
};

template <class T>
struct Image2D {
  int w = 0, h = 0;
  std::vector<T> data;  // x fastest
  std::optional<SliceProvenance> provenance;

  std::size_t index(int x, int y) const { return std::size_t(y) * w + x; }
  T at(int x, int y) const { return data[index(x, y)]; }
  T& at(int x, int y) { return data[index(x, y)]; }
};

template <class T>
struct Volume {
  int nx = 0, ny = 0, nz = 0;
  Dec voxel_size_um = Dec::from_int(1);
  std::vector<T> data;  // x fastest, then y, then z

  static constexpr Dtype dtype = dtype_of<T>::value;

  static Volume create(int nx, int ny, int nz, Dec voxel_size_um, T fill = T{}) {
    if (nx < 1 || ny < 1 || nz < 1) throw MalformedHeader("volume dims must be >= 1");
    if (!(voxel_size_um > Dec())) throw MalformedHeader("voxel_size_um must be > 0");
    Volume v;
    v.nx = nx;
    v.ny = ny;
    v.nz = nz;
    v.voxel_size_um = voxel_size_um;
    v.data.assign(std::size_t(nx) * ny * nz, fill);
    return v;
  }

  std::size_t voxel_count() const { return std::size_t(nx) * ny * nz; }
  std::size_t index(int x, int y, int z) const {
    return (std::size_t(z) * ny + y) * nx + x;
  }
  T at(int x, int y, int z) const { return data[index(x, y, z)]; }
  T& at(int x, int y, int z) { return data[index(x, y, z)]; }

  int extent(Axis a) const { return a == Axis::X ? nx : a == Axis::Y ? ny : nz; }
};

using VolumeU8 = Volume<std::uint8_t>;
using VolumeU16 = Volume<std::uint16_t>;
using VolumeF32 = Volume<float>;

using AnyVolume = std::variant<VolumeU8, VolumeU16, VolumeF32>;

inline Dtype dtype_of_any(const AnyVolume& v) {
  return std::visit([](const auto& vol) { return vol.dtype; }, v);
}

// Binary voxel labeling co-registered with a volume or ROI. `origin` is the
// offset of voxel (0,0,0) within the parent volume.
struct Mask3D {
  int nx = 0, ny = 0, nz = 0;
  std::vector<std::uint8_t> bits;  // 0 or 1, x fastest
  int origin_x = 0, origin_y = 0, origin_z = 0;

  static Mask3D create(int nx, int ny, int nz) {
    if (nx < 1 || ny < 1 || nz < 1) throw MalformedHeader("mask dims must be >= 1");
    Mask3D m;
    m.nx = nx;
    m.ny = ny;
    m.nz = nz;
    m.bits.assign(std::size_t(nx) * ny * nz, 0);
    return m;
  }

  std::size_t voxel_count() const { return std::size_t(nx) * ny * nz; }
  std::size_t index(int x, int y, int z) const {
    return (std::size_t(z) * ny + y) * nx + x;
  }
  bool test(int x, int y, int z) const { return bits[index(x, y, z)] != 0; }
  void set(int x, int y, int z, bool v = true) { bits[index(x, y, z)] = v ? 1 : 0; }

  std::int64_t foreground_count() const {
    std::int64_t n = 0;
    for (auto b : bits) n += b;
    return n;
  }

  bool same_dims(const Mask3D& o) const { return nx == o.nx && ny == o.ny && nz == o.nz; }
};

// --- slicing ------------------------------------------------------------

// axis=z -> (nx,ny) image, axis=x -> (ny,nz), axis=y -> (nx,nz).
template <class T>
Image2D<T> slice(const Volume<T>& v, Axis axis, int index) {
  const int ext = v.extent(axis);
  if (index < 0 || index >= ext) {
    throw IndexOutOfRange("slice index " + std::to_string(index) + " outside [0," +
                          std::to_string(ext) + ") on axis " + axis_name(axis));
  }
  Image2D<T> img;
  img.provenance = SliceProvenance{axis, index};
  switch (axis) {
    case Axis::Z:
      img.w = v.nx;
      img.h = v.ny;
      img.data.resize(std::size_t(img.w) * img.h);
      for (int y = 0; y < v.ny; ++y)
        for (int x = 0; x < v.nx; ++x) img.data[img.index(x, y)] = v.at(x, y, index);
      break;
    case Axis::X:
      img.w = v.ny;
      img.h = v.nz;
      img.data.resize(std::size_t(img.w) * img.h);
      for (int z = 0; z < v.nz; ++z)
        for (int y = 0; y < v.ny; ++y) img.data[img.index(y, z)] = v.at(index, y, z);
      break;
    case Axis::Y:
      img.w = v.nx;
      img.h = v.nz;
      img.data.resize(std::size_t(img.w) * img.h);
      for (int z = 0; z < v.nz; ++z)
        for (int x = 0; x < v.nx; ++x) img.data[img.index(x, z)] = v.at(x, index, z);
      break;
  }
  return img;
}

// Inverse of slicing: rebuilds a volume from all slices along one axis.
template <class T>
Volume<T> stack_slices(const std::vector<Image2D<T>>& slices, Axis axis, Dec voxel_size_um) {
  if (slices.empty()) throw MalformedHeader("stack_slices: no slices");
  const int w = slices.front().w, h = slices.front().h;
  const int n = static_cast<int>(slices.size());
  int nx, ny, nz;
  switch (axis) {
    case Axis::Z: nx = w; ny = h; nz = n; break;
    case Axis::X: nx = n; ny = w; nz = h; break;
    default: nx = w; ny = n; nz = h; break;
  }
  Volume<T> v = Volume<T>::create(nx, ny, nz, voxel_size_um);
  for (int i = 0; i < n; ++i) {
    const auto& img = slices[static_cast<std::size_t>(i)];
    if (img.w != w || img.h != h) throw DimMismatch("stack_slices: inconsistent slice dims");
    for (int b = 0; b < h; ++b)
      for (int a = 0; a < w; ++a) {
        T value = img.at(a, b);
        switch (axis) {
          case Axis::Z: v.at(a, b, i) = value; break;
          case Axis::X: v.at(i, a, b) = value; break;
          default: v.at(a, i, b) = value; break;
        }
      }
  }
  return v;
}

// --- cropping -----------------------------------------------------------

template <class T>
Volume<T> crop(const Volume<T>& v, const Cuboid3D& c) {
  if (!c.fits_in(v.nx, v.ny, v.nz)) {
    throw RoiOutOfBounds("crop: cuboid exceeds volume bounds");
  }
  Volume<T> out = Volume<T>::create(c.w, c.h, c.d, v.voxel_size_um);
  for (int k = 0; k < c.d; ++k)
    for (int j = 0; j < c.h; ++j)
      for (int i = 0; i < c.w; ++i) out.at(i, j, k) = v.at(c.x + i, c.y + j, c.z + k);
  return out;
}

inline Mask3D crop(const Mask3D& m, const Cuboid3D& c) {
  if (!c.fits_in(m.nx, m.ny, m.nz)) {
    throw RoiOutOfBounds("crop: cuboid exceeds mask bounds");
  }
  Mask3D out = Mask3D::create(c.w, c.h, c.d);
  out.origin_x = m.origin_x + c.x;
  out.origin_y = m.origin_y + c.y;
  out.origin_z = m.origin_z + c.z;
  for (int k = 0; k < c.d; ++k)
    for (int j = 0; j < c.h; ++j)
      for (int i = 0; i < c.w; ++i)
        out.bits[out.index(i, j, k)] = m.bits[m.index(c.x + i, c.y + j, c.z + k)];
  return out;
}

// Masks persist as u8 volume containers with values {0,1}.
inline VolumeU8 mask_to_volume(const Mask3D& m, Dec voxel_size_um) {
  VolumeU8 v = VolumeU8::create(m.nx, m.ny, m.nz, voxel_size_um);
  v.data = m.bits;
  return v;
}

inline Mask3D volume_to_mask(const VolumeU8& v) {
  Mask3D m = Mask3D::create(v.nx, v.ny, v.nz);
  for (std::size_t i = 0; i < v.data.size(); ++i) {
    if (v.data[i] > 1) throw MalformedDocument("mask volume has a value outside {0,1}");
    m.bits[i] = v.data[i];
  }
  return m;
}

}  // namespace voxmet
