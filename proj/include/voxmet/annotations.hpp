#pragma once

// Ground-truth annotations and detection exchange documents (UTF-8 JSON).
//
// Ground truth:
//   {"volume_id": str, "classes": [str],
//    "boxes": [{"class": int, "x": int, "y": int, "z": int,
//               "w": int, "h": int, "d": int}],
//    "mask_refs": [{"class": int, "path": str}]}
//
// Detection documents reuse the box schema and add "score" per box; 2D
// detections carry "axis" and "slice" per box with the in-plane geometry
// as x/y/w/h.

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "voxmet/errors.hpp"
#include "voxmet/geometry.hpp"

namespace voxmet {

struct MaskRef {
  int class_index = 0;
  std::string path;
  bool operator==(const MaskRef&) const = default;
};

struct GroundTruth {
  std::string volume_id;
  std::vector<std::string> classes;
  std::vector<Cuboid3D> boxes;  // score field unused for ground truth
  std::vector<MaskRef> mask_refs;
  bool operator==(const GroundTruth&) const = default;
};

// Flat per-slice detection set; boxes are kept grouped by slice index in
// ascending order with the detector's ordering inside each slice.
using Detections2D = std::vector<ScoredBox2D>;
using Detections3D = std::vector<Cuboid3D>;

namespace detail {

inline nlohmann::json parse_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw MissingFile("cannot open " + path);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw MalformedDocument(path + ": " + e.what());
  }
  return j;
}

inline void write_json_file(const nlohmann::json& j, const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoFailure("cannot open for write: " + path);
  f << j.dump(2) << "\n";
  if (!f) throw IoFailure("write failed: " + path);
}

inline int require_int(const nlohmann::json& j, const char* key, const std::string& ctx) {
  if (!j.contains(key) || !j[key].is_number_integer()) {
    throw MalformedDocument(ctx + ": missing or non-integer '" + key + "'");
  }
  return j[key].get<int>();
}

inline double require_number(const nlohmann::json& j, const char* key, const std::string& ctx) {
  if (!j.contains(key) || !j[key].is_number()) {
    throw MalformedDocument(ctx + ": missing or non-numeric '" + key + "'");
  }
  return j[key].get<double>();
}

inline std::string require_string(const nlohmann::json& j, const char* key,
                                  const std::string& ctx) {
  if (!j.contains(key) || !j[key].is_string()) {
    throw MalformedDocument(ctx + ": missing or non-string '" + key + "'");
  }
  return j[key].get<std::string>();
}

inline Cuboid3D cuboid_from_json(const nlohmann::json& jb, const std::string& ctx,
                                 bool with_score) {
  Cuboid3D c;
  c.class_index = require_int(jb, "class", ctx);
  c.x = require_int(jb, "x", ctx);
  c.y = require_int(jb, "y", ctx);
  c.z = require_int(jb, "z", ctx);
  c.w = require_int(jb, "w", ctx);
  c.h = require_int(jb, "h", ctx);
  c.d = require_int(jb, "d", ctx);
  if (with_score) c.score = require_number(jb, "score", ctx);
  try {
    c.validate(ctx.c_str());
  } catch (const InvalidBox&) {
    throw;
  }
  if (c.class_index < 0) throw InvalidBox(ctx + ": negative class index");
  return c;
}

inline nlohmann::json cuboid_to_json(const Cuboid3D& c, bool with_score) {
  nlohmann::json jb{{"class", c.class_index}, {"x", c.x}, {"y", c.y}, {"z", c.z},
                    {"w", c.w},               {"h", c.h}, {"d", c.d}};
  if (with_score) jb["score"] = c.score;
  return jb;
}

}  // namespace detail

inline void save_ground_truth(const GroundTruth& gt, const std::string& path) {
  nlohmann::json j;
  j["volume_id"] = gt.volume_id;
  j["classes"] = gt.classes;
  j["boxes"] = nlohmann::json::array();
  for (const auto& b : gt.boxes) j["boxes"].push_back(detail::cuboid_to_json(b, false));
  j["mask_refs"] = nlohmann::json::array();
  for (const auto& m : gt.mask_refs) {
    j["mask_refs"].push_back({{"class", m.class_index}, {"path", m.path}});
  }
  detail::write_json_file(j, path);
}

inline GroundTruth load_ground_truth(const std::string& path) {
  const nlohmann::json j = detail::parse_json_file(path);
  if (!j.is_object()) throw MalformedDocument(path + ": not a JSON object");
  GroundTruth gt;
  gt.volume_id = detail::require_string(j, "volume_id", path);
  if (!j.contains("classes") || !j["classes"].is_array()) {
    throw MalformedDocument(path + ": missing 'classes' array");
  }
  for (const auto& c : j["classes"]) {
    if (!c.is_string()) throw MalformedDocument(path + ": class names must be strings");
    gt.classes.push_back(c.get<std::string>());
  }
  if (!j.contains("boxes") || !j["boxes"].is_array()) {
    throw MalformedDocument(path + ": missing 'boxes' array");
  }
  const int n_classes = static_cast<int>(gt.classes.size());
  int record = 0;
  for (const auto& jb : j["boxes"]) {
    const std::string ctx = path + ": boxes[" + std::to_string(record) + "]";
    Cuboid3D c = detail::cuboid_from_json(jb, ctx, false);
    if (c.class_index >= n_classes) {
      throw UnknownClassIndex(ctx + ": class " + std::to_string(c.class_index) +
                              " with only " + std::to_string(n_classes) + " classes");
    }
    gt.boxes.push_back(c);
    ++record;
  }
  if (j.contains("mask_refs")) {
    if (!j["mask_refs"].is_array()) throw MalformedDocument(path + ": 'mask_refs' must be an array");
    record = 0;
    for (const auto& jm : j["mask_refs"]) {
      const std::string ctx = path + ": mask_refs[" + std::to_string(record) + "]";
      MaskRef m;
      m.class_index = detail::require_int(jm, "class", ctx);
      m.path = detail::require_string(jm, "path", ctx);
      if (m.class_index < 0 || m.class_index >= n_classes) {
        throw UnknownClassIndex(ctx + ": class " + std::to_string(m.class_index));
      }
      gt.mask_refs.push_back(m);
      ++record;
    }
  }
  return gt;
}

// --- 2D detections -------------------------------------------------------

inline void save_detections_2d(const Detections2D& dets, const std::string& path,
                               const std::string& volume_id = "",
                               const std::vector<std::string>& classes = {}) {
  nlohmann::json j;
  j["volume_id"] = volume_id;
  j["classes"] = classes;
  j["boxes"] = nlohmann::json::array();
  for (const auto& b : dets) {
    j["boxes"].push_back({{"class", b.class_index},
                          {"x", b.x_min},
                          {"y", b.y_min},
                          {"w", b.width()},
                          {"h", b.height()},
                          {"score", b.score},
                          {"axis", axis_name(b.axis)},
                          {"slice", b.slice_index}});
  }
  detail::write_json_file(j, path);
}

inline Detections2D load_detections_2d(const std::string& path) {
  const nlohmann::json j = detail::parse_json_file(path);
  if (!j.is_object() || !j.contains("boxes") || !j["boxes"].is_array()) {
    throw MalformedDocument(path + ": missing 'boxes' array");
  }
  Detections2D dets;
  int record = 0;
  for (const auto& jb : j["boxes"]) {
    const std::string ctx = path + ": boxes[" + std::to_string(record) + "]";
    ScoredBox2D b;
    b.class_index = detail::require_int(jb, "class", ctx);
    b.x_min = detail::require_int(jb, "x", ctx);
    b.y_min = detail::require_int(jb, "y", ctx);
    const int w = detail::require_int(jb, "w", ctx);
    const int h = detail::require_int(jb, "h", ctx);
    b.x_max = b.x_min + w - 1;
    b.y_max = b.y_min + h - 1;
    b.score = detail::require_number(jb, "score", ctx);
    b.axis = parse_axis(detail::require_string(jb, "axis", ctx));
    b.slice_index = detail::require_int(jb, "slice", ctx);
    b.validate(ctx.c_str());
    if (b.class_index < 0) throw InvalidBox(ctx + ": negative class index");
    dets.push_back(b);
    ++record;
  }
  return dets;
}

// --- 3D detections -------------------------------------------------------

inline void save_detections_3d(const Detections3D& dets, const std::string& path,
                               const std::string& volume_id = "",
                               const std::vector<std::string>& classes = {}) {
  nlohmann::json j;
  j["volume_id"] = volume_id;
  j["classes"] = classes;
  j["boxes"] = nlohmann::json::array();
  for (const auto& c : dets) j["boxes"].push_back(detail::cuboid_to_json(c, true));
  detail::write_json_file(j, path);
}

inline Detections3D load_detections_3d(const std::string& path) {
  const nlohmann::json j = detail::parse_json_file(path);
  if (!j.is_object() || !j.contains("boxes") || !j["boxes"].is_array()) {
    throw MalformedDocument(path + ": missing 'boxes' array");
  }
  Detections3D dets;
  int record = 0;
  for (const auto& jb : j["boxes"]) {
    const std::string ctx = path + ": boxes[" + std::to_string(record) + "]";
    dets.push_back(detail::cuboid_from_json(jb, ctx, true));
    ++record;
  }
  return dets;
}

}  // namespace voxmet
