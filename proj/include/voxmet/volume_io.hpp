#pragma once

// Volume container: a `<name>.meta` text header plus a `<name>.raw` payload.
// The header is UTF-8 `key=value` lines, LF-terminated, with exactly the
// keys nx, ny, nz, dtype, voxel_size_um. The payload is x-fastest with
// little-endian multi-byte scalars, independent of host endianness.

#include <bit>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "voxmet/decimal.hpp"
#include "voxmet/errors.hpp"
#include "voxmet/volume.hpp"

namespace voxmet {

namespace detail {

inline std::string strip_container_suffix(const std::string& path) {
  for (std::string_view ext : {".meta", ".raw"}) {
    if (path.size() > ext.size() && path.ends_with(ext)) {
      return path.substr(0, path.size() - ext.size());
    }
  }
  return path;
}

inline std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw MissingFile("cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());
  if (f.bad()) throw IoFailure("read failed: " + path);
  return bytes;
}

inline void write_file_bytes(const std::string& path, const void* data, std::size_t size) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoFailure("cannot open for write: " + path);
  f.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
  f.flush();
  if (!f) throw IoFailure("write failed: " + path);
}

template <class T>
void encode_le(const std::vector<T>& values, std::vector<std::uint8_t>& out) {
  out.resize(values.size() * sizeof(T));
  std::size_t o = 0;
  for (T v : values) {
    if constexpr (sizeof(T) == 1) {
      out[o++] = static_cast<std::uint8_t>(v);
    } else if constexpr (sizeof(T) == 2) {
      auto u = static_cast<std::uint16_t>(v);
      out[o++] = static_cast<std::uint8_t>(u & 0xff);
      out[o++] = static_cast<std::uint8_t>(u >> 8);
    } else {
      auto u = std::bit_cast<std::uint32_t>(v);
      out[o++] = static_cast<std::uint8_t>(u & 0xff);
      out[o++] = static_cast<std::uint8_t>((u >> 8) & 0xff);
      out[o++] = static_cast<std::uint8_t>((u >> 16) & 0xff);
      out[o++] = static_cast<std::uint8_t>((u >> 24) & 0xff);
    }
  }
}

template <class T>
void decode_le(const std::vector<std::uint8_t>& bytes, std::vector<T>& out) {
  out.resize(bytes.size() / sizeof(T));
  std::size_t o = 0;
  for (T& v : out) {
    if constexpr (sizeof(T) == 1) {
      v = static_cast<T>(bytes[o++]);
    } else if constexpr (sizeof(T) == 2) {
      std::uint16_t u = static_cast<std::uint16_t>(bytes[o]) |
                        static_cast<std::uint16_t>(bytes[o + 1]) << 8;
      o += 2;
      v = static_cast<T>(u);
    } else {
      std::uint32_t u = static_cast<std::uint32_t>(bytes[o]) |
                        static_cast<std::uint32_t>(bytes[o + 1]) << 8 |
                        static_cast<std::uint32_t>(bytes[o + 2]) << 16 |
                        static_cast<std::uint32_t>(bytes[o + 3]) << 24;
      o += 4;
      v = std::bit_cast<float>(u);
    }
  }
}

struct Header {
  int nx, ny, nz;
  Dtype dtype;
  Dec voxel_size_um;
};

inline int parse_positive_int(const std::string& key, const std::string& value) {
  if (value.empty()) throw MalformedHeader(key + ": empty value");
  long long n = 0;
  for (char c : value) {
    if (c < '0' || c > '9') throw MalformedHeader(key + ": non-numeric value '" + value + "'");
    n = n * 10 + (c - '0');
    if (n > 1'000'000'000LL) throw MalformedHeader(key + ": value too large");
  }
  if (n < 1) throw MalformedHeader(key + ": must be >= 1");
  return static_cast<int>(n);
}

inline Header parse_header(const std::string& text, const std::string& path) {
  std::map<std::string, std::string> kv;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) {
      throw MalformedHeader(path + ": line not LF-terminated");
    }
    const std::string line = text.substr(pos, nl - pos);
    pos = nl + 1;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw MalformedHeader(path + ": missing '=' in line '" + line + "'");
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (key != "nx" && key != "ny" && key != "nz" && key != "dtype" && key != "voxel_size_um") {
      throw MalformedHeader(path + ": unknown key '" + key + "'");
    }
    if (!kv.emplace(key, value).second) {
      throw MalformedHeader(path + ": duplicate key '" + key + "'");
    }
  }
  for (const char* required : {"nx", "ny", "nz", "dtype", "voxel_size_um"}) {
    if (!kv.count(required)) throw MalformedHeader(path + ": missing required key '" + required + "'");
  }
  Header h;
  h.nx = parse_positive_int("nx", kv["nx"]);
  h.ny = parse_positive_int("ny", kv["ny"]);
  h.nz = parse_positive_int("nz", kv["nz"]);
  const std::string& dt = kv["dtype"];
  if (dt == "u8") h.dtype = Dtype::U8;
  else if (dt == "u16le") h.dtype = Dtype::U16le;
  else if (dt == "f32le") h.dtype = Dtype::F32le;
  else throw MalformedHeader(path + ": unknown dtype '" + dt + "'");
  try {
    h.voxel_size_um = Dec::parse(kv["voxel_size_um"]);
  } catch (const std::exception&) {
    throw MalformedHeader(path + ": non-numeric voxel_size_um '" + kv["voxel_size_um"] + "'");
  }
  if (!(h.voxel_size_um > Dec())) throw MalformedHeader(path + ": voxel_size_um must be > 0");
  return h;
}

}  // namespace detail

template <class T>
void save_volume(const Volume<T>& v, const std::string& path) {
  const std::string prefix = detail::strip_container_suffix(path);
  std::string meta;
  meta += "nx=" + std::to_string(v.nx) + "\n";
  meta += "ny=" + std::to_string(v.ny) + "\n";
  meta += "nz=" + std::to_string(v.nz) + "\n";
  meta += std::string("dtype=") + dtype_name(v.dtype) + "\n";
  meta += "voxel_size_um=" + v.voxel_size_um.str() + "\n";
  detail::write_file_bytes(prefix + ".meta", meta.data(), meta.size());
  std::vector<std::uint8_t> payload;
  detail::encode_le(v.data, payload);
  detail::write_file_bytes(prefix + ".raw", payload.data(), payload.size());
}

inline void save_volume(const AnyVolume& v, const std::string& path) {
  std::visit([&](const auto& vol) { save_volume(vol, path); }, v);
}

inline AnyVolume load_volume(const std::string& path) {
  const std::string prefix = detail::strip_container_suffix(path);
  const std::string meta_path = prefix + ".meta";
  const std::string raw_path = prefix + ".raw";
  if (!std::filesystem::exists(meta_path)) throw MissingFile("missing " + meta_path);
  if (!std::filesystem::exists(raw_path)) throw MissingFile("missing " + raw_path);

  const auto meta_bytes = detail::read_file_bytes(meta_path);
  const detail::Header h =
      detail::parse_header(std::string(meta_bytes.begin(), meta_bytes.end()), meta_path);

  const auto payload = detail::read_file_bytes(raw_path);
  const std::size_t expected =
      std::size_t(h.nx) * h.ny * h.nz * dtype_size(h.dtype);
  if (payload.size() != expected) {
    throw TruncatedData(raw_path + ": raw byte count " + std::to_string(payload.size()) +
                        " != expected " + std::to_string(expected));
  }

  auto build = [&](auto tag) -> AnyVolume {
    using S = decltype(tag);
    Volume<S> v = Volume<S>::create(h.nx, h.ny, h.nz, h.voxel_size_um);
    detail::decode_le(payload, v.data);
    return v;
  };
  switch (h.dtype) {
    case Dtype::U8: return build(std::uint8_t{});
    case Dtype::U16le: return build(std::uint16_t{});
    default: return build(float{});
  }
}

// Typed load; a container of any other dtype is unusable for the caller.
template <class T>
Volume<T> load_volume_as(const std::string& path) {
  AnyVolume any = load_volume(path);
  if (auto* v = std::get_if<Volume<T>>(&any)) return std::move(*v);
  throw MalformedHeader(path + ": expected dtype " +
                        dtype_name(dtype_of<T>::value) + ", found " +
                        dtype_name(dtype_of_any(any)));
}

}  // namespace voxmet
