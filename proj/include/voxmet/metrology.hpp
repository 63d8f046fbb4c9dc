#pragma once

// 3D metrology over binary masks: per-slice cleanup, outer contour of the
// surviving component, tight rectangle, depth extent from the first to the
// last nonempty slice, and exact micrometer conversion of the resulting
// cuboid.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "voxmet/annotations.hpp"
#include "voxmet/decimal.hpp"
#include "voxmet/errors.hpp"
#include "voxmet/geometry.hpp"
#include "voxmet/labeling.hpp"
#include "voxmet/metrics.hpp"
#include "voxmet/morphology.hpp"
#include "voxmet/volume.hpp"

namespace voxmet {

struct CleanupConfig {
  int opening_radius = 1;  // 3x3 opening; 0 disables
};

// Opening, then keep only the largest 8-connected component (ties go to the
// component whose anchor pixel comes first in scan order). All-background
// input stays all-background.
inline std::vector<std::uint8_t> clean_mask(const std::uint8_t* mask, int w, int h,
                                            const CleanupConfig& cfg = {}) {
  std::vector<std::uint8_t> cleaned(mask, mask + std::size_t(w) * h);
  if (cfg.opening_radius > 0) {
    cleaned = morph_open(cleaned.data(), w, h, cfg.opening_radius);
  }
  const Components comps = connected_components(cleaned.data(), w, h, 8);
  if (comps.stats.size() <= 1) return cleaned;
  const ComponentStats* keep = largest_component(comps);
  for (std::size_t i = 0; i < cleaned.size(); ++i) {
    cleaned[i] = comps.labels[i] == keep->label ? 1 : 0;
  }
  return cleaned;
}

struct PixelCoord {
  int x = 0, y = 0;
  bool operator==(const PixelCoord&) const = default;
};

// Moore-neighbor trace of the outer boundary of the largest-area component,
// starting at its first pixel in scan order. The fixed orientation walks a
// solid square's top row left-to-right first. One-pixel components yield a
// single-point contour; one-pixel-wide arms are visited on both sides.
inline std::vector<PixelCoord> best_contour(const std::uint8_t* mask, int w, int h) {
  const Components comps = connected_components(mask, w, h, 8);
  if (comps.stats.empty()) throw EmptyMask("best_contour: no foreground pixels");
  const ComponentStats* target = largest_component(comps);
  const std::int32_t label = target->label;

  auto is_fg = [&](int x, int y) {
    return x >= 0 && x < w && y >= 0 && y < h &&
           comps.labels[std::size_t(y) * w + x] == label;
  };

  // clockwise neighbor ring in screen coordinates (y down)
  static constexpr int dx[8] = {1, 1, 0, -1, -1, -1, 0, 1};
  static constexpr int dy[8] = {0, 1, 1, 1, 0, -1, -1, -1};

  const PixelCoord start{target->anchor_x, target->anchor_y};
  std::vector<PixelCoord> contour{start};

  // first move: scan from NW (the pixel west of start is background)
  int dir = -1;
  PixelCoord current = start;
  for (int k = 0; k < 8; ++k) {
    const int cand = (5 + k) % 8;
    if (is_fg(current.x + dx[cand], current.y + dy[cand])) {
      dir = cand;
      break;
    }
  }
  if (dir < 0) return contour;  // isolated pixel

  const PixelCoord second{start.x + dx[dir], start.y + dy[dir]};
  const int first_dir = dir;
  current = second;
  const std::size_t step_limit = 4 * (std::size_t(w) * h + 1);
  for (std::size_t step = 0; step < step_limit; ++step) {
    if (current == start) {
      // Jacob's criterion: back at the start about to repeat the first move
      int probe = (dir + 6) % 8;
      int next_dir = -1;
      for (int k = 0; k < 8; ++k) {
        const int cand = (probe + k) % 8;
        if (is_fg(current.x + dx[cand], current.y + dy[cand])) {
          next_dir = cand;
          break;
        }
      }
      if (next_dir == first_dir) break;
    }
    contour.push_back(current);
    const int probe = (dir + 6) % 8;
    for (int k = 0; k < 8; ++k) {
      const int cand = (probe + k) % 8;
      if (is_fg(current.x + dx[cand], current.y + dy[cand])) {
        dir = cand;
        break;
      }
    }
    current = {current.x + dx[dir], current.y + dy[dir]};
  }
  return contour;
}

inline Rect2D tight_rect(const std::vector<PixelCoord>& contour) {
  if (contour.empty()) throw EmptyContour("tight_rect: empty contour");
  int x0 = contour[0].x, x1 = contour[0].x, y0 = contour[0].y, y1 = contour[0].y;
  for (const auto& p : contour) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  return Rect2D{x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

struct MeasuredRoi {
  Cuboid3D cuboid;  // in the mask's parent coordinates (origin applied)
  std::vector<std::string> flags;
};

// Axial depth scan: clean every slice, take the tight rectangle of each
// nonempty one, start at the first nonempty slice and stop at the last.
// Interior empty slices do not split the ROI; they are recorded in flags.
inline MeasuredRoi measure_roi(const Mask3D& mask, const CleanupConfig& cfg = {}) {
  MeasuredRoi out;
  const std::size_t slice_px = std::size_t(mask.nx) * mask.ny;
  std::vector<std::optional<Rect2D>> rects(static_cast<std::size_t>(mask.nz));
  bool cleanup_changed = false;
  for (int z = 0; z < mask.nz; ++z) {
    const std::uint8_t* raw = mask.bits.data() + std::size_t(z) * slice_px;
    const auto cleaned = clean_mask(raw, mask.nx, mask.ny, cfg);
    if (!std::equal(cleaned.begin(), cleaned.end(), raw)) cleanup_changed = true;
    const bool any = std::any_of(cleaned.begin(), cleaned.end(), [](std::uint8_t b) { return b != 0; });
    if (any) {
      rects[static_cast<std::size_t>(z)] =
          tight_rect(best_contour(cleaned.data(), mask.nx, mask.ny));
    }
  }

  int z_first = -1, z_last = -1;
  for (int z = 0; z < mask.nz; ++z) {
    if (!rects[static_cast<std::size_t>(z)]) continue;
    if (z_first < 0) z_first = z;
    z_last = z;
  }
  if (z_first < 0) {
    throw EmptyAfterCleanup("measure_roi: every slice cleaned to empty");
  }

  int x0 = INT32_MAX, y0 = INT32_MAX, x1 = -1, y1 = -1;
  int interior_gaps = 0;
  for (int z = z_first; z <= z_last; ++z) {
    const auto& rect = rects[static_cast<std::size_t>(z)];
    if (!rect) {
      ++interior_gaps;
      continue;
    }
    x0 = std::min(x0, rect->x);
    y0 = std::min(y0, rect->y);
    x1 = std::max(x1, rect->x_max());
    y1 = std::max(y1, rect->y_max());
  }

  out.cuboid.x = mask.origin_x + x0;
  out.cuboid.y = mask.origin_y + y0;
  out.cuboid.z = mask.origin_z + z_first;
  out.cuboid.w = x1 - x0 + 1;
  out.cuboid.h = y1 - y0 + 1;
  out.cuboid.d = z_last - z_first + 1;
  out.cuboid.score = 1.0;
  if (cleanup_changed) out.flags.push_back("cleanup_modified");
  if (interior_gaps > 0) {
    out.flags.push_back("interior_empty_slices=" + std::to_string(interior_gaps));
  }
  return out;
}

// Exact decimal conversion: each voxel extent times the voxel pitch.
inline DimsUm to_microns(const Cuboid3D& c, Dec voxel_size_um) {
  if (!(voxel_size_um > Dec())) throw MalformedHeader("voxel_size_um must be > 0");
  return {voxel_size_um * c.w, voxel_size_um * c.h, voxel_size_um * c.d};
}

// --- report -------------------------------------------------------------------

struct RoiRecord {
  int roi_id = 0;
  int class_index = 0;
  std::string class_name;
  Cuboid3D cuboid;
  DimsUm um;
  int z_start = 0, z_end = 0;
  std::vector<std::string> flags;
  bool has_gt = false;
  Cuboid3D gt_cuboid;
  DimsUm gt_um;
  DimsUm abs_err_um;
};

struct MetrologyReport {
  Dec voxel_size_um;
  std::vector<RoiRecord> records;
  bool has_aggregates = false;
  DimErrorStats aggregates;  // over gt-matched records
};

// One record per measured ROI; when ground truth is supplied, each record
// is paired per class by greedy 3D IoU and per-axis micrometer errors are
// attached. Aggregates cover the matched pairs.
inline MetrologyReport build_report(const std::vector<MeasuredRoi>& rois, Dec voxel_size_um,
                                    const GroundTruth* gt = nullptr,
                                    double match_iou = 0.5) {
  MetrologyReport report;
  report.voxel_size_um = voxel_size_um;
  for (std::size_t i = 0; i < rois.size(); ++i) {
    RoiRecord rec;
    rec.roi_id = static_cast<int>(i);
    rec.class_index = rois[i].cuboid.class_index;
    rec.cuboid = rois[i].cuboid;
    rec.um = to_microns(rec.cuboid, voxel_size_um);
    rec.z_start = rec.cuboid.z;
    rec.z_end = rec.cuboid.z_max();
    rec.flags = rois[i].flags;
    if (gt && rec.class_index < static_cast<int>(gt->classes.size())) {
      rec.class_name = gt->classes[static_cast<std::size_t>(rec.class_index)];
    } else {
      rec.class_name = "class_" + std::to_string(rec.class_index);
    }
    report.records.push_back(std::move(rec));
  }

  if (gt) {
    std::vector<int> classes;
    for (const auto& r : report.records) classes.push_back(r.class_index);
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());

    std::vector<DimsUm> matched_meas, matched_gt;
    for (int c : classes) {
      std::vector<Cuboid3D> preds, gts;
      std::vector<int> pred_ids;
      std::vector<const Cuboid3D*> gt_boxes;
      for (auto& r : report.records) {
        if (r.class_index == c) {
          preds.push_back(r.cuboid);
          pred_ids.push_back(r.roi_id);
        }
      }
      for (const auto& b : gt->boxes) {
        if (b.class_index == c) {
          gts.push_back(b);
          gt_boxes.push_back(&b);
        }
      }
      const MatchResult m = match_detections_3d(preds, gts, match_iou);
      for (const auto& tp : m.true_positives) {
        RoiRecord& rec =
            report.records[static_cast<std::size_t>(pred_ids[static_cast<std::size_t>(tp.pred_index)])];
        rec.has_gt = true;
        rec.gt_cuboid = *gt_boxes[static_cast<std::size_t>(tp.gt_index)];
        rec.gt_um = to_microns(rec.gt_cuboid, voxel_size_um);
        for (int a = 0; a < 3; ++a) {
          rec.abs_err_um[static_cast<std::size_t>(a)] =
              (rec.um[static_cast<std::size_t>(a)] - rec.gt_um[static_cast<std::size_t>(a)]).abs();
        }
      }
      for (int fp : m.false_positives) {
        report.records[static_cast<std::size_t>(pred_ids[static_cast<std::size_t>(fp)])]
            .flags.push_back("unmatched");
      }
    }
    for (const auto& r : report.records) {
      if (r.has_gt) {
        matched_meas.push_back(r.um);
        matched_gt.push_back(r.gt_um);
      }
    }
    if (!matched_meas.empty()) {
      report.aggregates = dimension_errors(matched_meas, matched_gt);
      report.has_aggregates = true;
    }
  }
  return report;
}

inline nlohmann::json report_to_json(const MetrologyReport& report) {
  nlohmann::json j;
  j["voxel_size_um"] = report.voxel_size_um.to_double();
  j["records"] = nlohmann::json::array();
  for (const auto& r : report.records) {
    nlohmann::json jr;
    jr["roi"] = r.roi_id;
    jr["class"] = r.class_index;
    jr["class_name"] = r.class_name;
    jr["cuboid"] = detail::cuboid_to_json(r.cuboid, false);
    jr["w_um"] = r.um[0].to_double();
    jr["h_um"] = r.um[1].to_double();
    jr["d_um"] = r.um[2].to_double();
    jr["z_start"] = r.z_start;
    jr["z_end"] = r.z_end;
    jr["flags"] = r.flags;
    if (r.has_gt) {
      jr["gt_cuboid"] = detail::cuboid_to_json(r.gt_cuboid, false);
      jr["gt_w_um"] = r.gt_um[0].to_double();
      jr["gt_h_um"] = r.gt_um[1].to_double();
      jr["gt_d_um"] = r.gt_um[2].to_double();
      jr["abs_err_um"] = {r.abs_err_um[0].to_double(), r.abs_err_um[1].to_double(),
                          r.abs_err_um[2].to_double()};
    }
    j["records"].push_back(jr);
  }
  if (report.has_aggregates) {
    j["aggregates"] = {{"mae_um", report.aggregates.mae.to_double()},
                       {"mse_um2", report.aggregates.mse.to_double()},
                       {"rmse_um", report.aggregates.rmse},
                       {"exact", report.aggregates.exact}};
  }
  return j;
}

// Aligned plain-text table; ground-truth columns appear when any record
// carries them.
inline std::string render_report_table(const MetrologyReport& report) {
  const bool with_gt = std::any_of(report.records.begin(), report.records.end(),
                                   [](const RoiRecord& r) { return r.has_gt; });
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{"Structure", "W", "H", "D"};
  if (with_gt) {
    header.insert(header.end(), {"GT W", "GT H", "GT D"});
  }
  rows.push_back(header);
  for (const auto& r : report.records) {
    std::vector<std::string> row{r.class_name + "#" + std::to_string(r.roi_id),
                                 r.um[0].str(), r.um[1].str(), r.um[2].str()};
    if (with_gt) {
      if (r.has_gt) {
        row.insert(row.end(), {r.gt_um[0].str(), r.gt_um[1].str(), r.gt_um[2].str()});
      } else {
        row.insert(row.end(), {"-", "-", "-"});
      }
    }
    rows.push_back(row);
  }
  std::vector<std::size_t> widths(rows[0].size(), 0);
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], row[c].size());
  }
  std::string out;
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out += row[c];
      if (c + 1 < row.size()) out.append(widths[c] - row[c].size() + 2, ' ');
    }
    out += '\n';
  }
  if (report.has_aggregates) {
    out += "MAE = " + report.aggregates.mae.str() + " um, MSE = " +
           report.aggregates.mse.str() + " um^2\n";
  }
  return out;
}

}  // namespace voxmet
