#pragma once

// Evaluation math: 2D/3D IoU, greedy matching at an IoU threshold,
// precision, average precision (standard all-point form plus the
// mean-precision-over-predictions variant), Dice, and dimension-error
// statistics in exact decimal micrometers.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "voxmet/decimal.hpp"
#include "voxmet/errors.hpp"
#include "voxmet/geometry.hpp"
#include "voxmet/volume.hpp"

namespace voxmet {

// Exact ratio of voxel counts; num/den with den > 0, or 0/1 for disjoint.
struct Ratio {
  std::int64_t num = 0;
  std::int64_t den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const Ratio& o) const { return num * o.den == o.num * den; }
};

namespace detail {

inline std::int64_t overlap_1d(int a0, int a1, int b0, int b1) {
  const int lo = std::max(a0, b0), hi = std::min(a1, b1);
  return hi >= lo ? hi - lo + 1 : 0;
}

}  // namespace detail

inline Ratio iou2d_ratio(const ScoredBox2D& a, const ScoredBox2D& b) {
  const std::int64_t inter = detail::overlap_1d(a.x_min, a.x_max, b.x_min, b.x_max) *
                             detail::overlap_1d(a.y_min, a.y_max, b.y_min, b.y_max);
  const std::int64_t uni = a.area() + b.area() - inter;
  return inter == 0 ? Ratio{0, 1} : Ratio{inter, uni};
}

inline double iou2d(const ScoredBox2D& a, const ScoredBox2D& b) {
  return iou2d_ratio(a, b).value();
}

inline Ratio iou3d_ratio(const Cuboid3D& a, const Cuboid3D& b) {
  const std::int64_t inter = detail::overlap_1d(a.x, a.x_max(), b.x, b.x_max()) *
                             detail::overlap_1d(a.y, a.y_max(), b.y, b.y_max()) *
                             detail::overlap_1d(a.z, a.z_max(), b.z, b.z_max());
  const std::int64_t uni = a.volume() + b.volume() - inter;
  return inter == 0 ? Ratio{0, 1} : Ratio{inter, uni};
}

inline double iou3d(const Cuboid3D& a, const Cuboid3D& b) {
  return iou3d_ratio(a, b).value();
}

// --- greedy matching -------------------------------------------------------

struct MatchResult {
  struct TruePositive {
    int pred_index;
    int gt_index;
    double iou;
  };
  std::vector<TruePositive> true_positives;
  std::vector<int> false_positives;  // pred indices
  std::vector<int> false_negatives;  // gt indices
  double iou_threshold = 0.5;
};

namespace detail {

// Predictions iterate by descending score (ties by the canonical box order);
// each takes the unmatched ground truth with maximal IoU >= threshold (ties
// by lowest gt index), else becomes a false positive.
template <class BoxT, class IouFn, class OrderFn>
MatchResult match_greedy(std::span<const BoxT> preds, std::span<const BoxT> gts,
                         double iou_threshold, IouFn iou, OrderFn order) {
  MatchResult m;
  m.iou_threshold = iou_threshold;
  std::vector<int> pred_order(preds.size());
  std::iota(pred_order.begin(), pred_order.end(), 0);
  std::stable_sort(pred_order.begin(), pred_order.end(), [&](int a, int b) {
    const auto& pa = preds[static_cast<std::size_t>(a)];
    const auto& pb = preds[static_cast<std::size_t>(b)];
    if (pa.score != pb.score) return pa.score > pb.score;
    return order(pa, pb);
  });

  std::vector<char> gt_taken(gts.size(), 0);
  for (int pi : pred_order) {
    int best_gt = -1;
    double best_iou = 0.0;
    for (std::size_t gi = 0; gi < gts.size(); ++gi) {
      if (gt_taken[gi]) continue;
      const double v = iou(preds[static_cast<std::size_t>(pi)], gts[gi]);
      if (v >= iou_threshold && v > best_iou) {
        best_iou = v;
        best_gt = static_cast<int>(gi);
      }
    }
    if (best_gt >= 0) {
      gt_taken[static_cast<std::size_t>(best_gt)] = 1;
      m.true_positives.push_back({pi, best_gt, best_iou});
    } else {
      m.false_positives.push_back(pi);
    }
  }
  for (std::size_t gi = 0; gi < gts.size(); ++gi) {
    if (!gt_taken[gi]) m.false_negatives.push_back(static_cast<int>(gi));
  }
  return m;
}

}  // namespace detail

inline MatchResult match_detections_2d(std::span<const ScoredBox2D> preds,
                                       std::span<const ScoredBox2D> gts,
                                       double iou_threshold = 0.5) {
  return detail::match_greedy(preds, gts, iou_threshold,
                              [](const ScoredBox2D& a, const ScoredBox2D& b) { return iou2d(a, b); },
                              box_order_2d);
}

inline MatchResult match_detections_3d(std::span<const Cuboid3D> preds,
                                       std::span<const Cuboid3D> gts,
                                       double iou_threshold = 0.5) {
  return detail::match_greedy(preds, gts, iou_threshold,
                              [](const Cuboid3D& a, const Cuboid3D& b) { return iou3d(a, b); },
                              cuboid_order);
}

inline double precision(const MatchResult& m) {
  const std::size_t n = m.true_positives.size() + m.false_positives.size();
  if (n == 0) throw UndefinedPrecision("precision undefined with zero predictions");
  return static_cast<double>(m.true_positives.size()) / static_cast<double>(n);
}

// --- average precision -------------------------------------------------------

struct PrPoint {
  double recall;
  double precision;
};

struct ClassAp {
  int class_index = 0;
  double ap_standard = 0.0;      // area under the right-monotone PR curve
  double ap_paper_literal = 0.0; // mean precision after each prediction
  std::vector<PrPoint> curve;    // one point per prediction, score-descending
};

struct ApResult {
  std::vector<ClassAp> per_class;
  double map_standard = 0.0;
  double map_paper_literal = 0.0;
};

namespace detail {

template <class BoxT, class IouFn, class OrderFn>
ClassAp ap_one_class(std::span<const BoxT> preds, std::span<const BoxT> gts,
                     double iou_threshold, IouFn iou, OrderFn order) {
  ClassAp r;
  const MatchResult m = match_greedy(preds, gts, iou_threshold, iou, order);
  std::vector<int> pred_order(preds.size());
  std::iota(pred_order.begin(), pred_order.end(), 0);
  std::stable_sort(pred_order.begin(), pred_order.end(), [&](int a, int b) {
    const auto& pa = preds[static_cast<std::size_t>(a)];
    const auto& pb = preds[static_cast<std::size_t>(b)];
    if (pa.score != pb.score) return pa.score > pb.score;
    return order(pa, pb);
  });
  std::vector<char> is_tp(preds.size(), 0);
  for (const auto& tp : m.true_positives) is_tp[static_cast<std::size_t>(tp.pred_index)] = 1;

  const double n_gt = static_cast<double>(gts.size());
  int tp = 0;
  double literal_sum = 0.0;
  for (std::size_t i = 0; i < pred_order.size(); ++i) {
    if (is_tp[static_cast<std::size_t>(pred_order[i])]) ++tp;
    const double prec = static_cast<double>(tp) / static_cast<double>(i + 1);
    literal_sum += prec;
    r.curve.push_back({static_cast<double>(tp) / n_gt, prec});
  }
  r.ap_paper_literal = preds.empty() ? 0.0 : literal_sum / static_cast<double>(preds.size());

  // All-point AP: precision envelope from the right, summed over recall steps.
  std::vector<double> envelope(r.curve.size());
  double running = 0.0;
  for (std::size_t i = r.curve.size(); i-- > 0;) {
    running = std::max(running, r.curve[i].precision);
    envelope[i] = running;
  }
  double ap = 0.0, prev_recall = 0.0;
  for (std::size_t i = 0; i < r.curve.size(); ++i) {
    ap += (r.curve[i].recall - prev_recall) * envelope[i];
    prev_recall = r.curve[i].recall;
  }
  r.ap_standard = ap;
  return r;
}

template <class BoxT, class IouFn, class OrderFn>
ApResult ap_all_classes(std::span<const BoxT> preds, std::span<const BoxT> gts,
                        double iou_threshold, IouFn iou, OrderFn order) {
  if (gts.empty()) throw NoGroundTruth("average precision undefined without ground truth");
  std::vector<int> classes;
  for (const auto& g : gts) classes.push_back(g.class_index);
  for (const auto& p : preds) classes.push_back(p.class_index);
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());

  ApResult result;
  for (int c : classes) {
    std::vector<BoxT> pc, gc;
    for (const auto& p : preds)
      if (p.class_index == c) pc.push_back(p);
    for (const auto& g : gts)
      if (g.class_index == c) gc.push_back(g);
    if (gc.empty()) {
      throw NoGroundTruth("class " + std::to_string(c) + " has predictions but no ground truth");
    }
    ClassAp ap = ap_one_class(std::span<const BoxT>(pc), std::span<const BoxT>(gc),
                              iou_threshold, iou, order);
    ap.class_index = c;
    result.per_class.push_back(std::move(ap));
  }
  for (const auto& c : result.per_class) {
    result.map_standard += c.ap_standard;
    result.map_paper_literal += c.ap_paper_literal;
  }
  result.map_standard /= static_cast<double>(result.per_class.size());
  result.map_paper_literal /= static_cast<double>(result.per_class.size());
  return result;
}

}  // namespace detail

inline ApResult average_precision_2d(std::span<const ScoredBox2D> preds,
                                     std::span<const ScoredBox2D> gts,
                                     double iou_threshold = 0.5) {
  return detail::ap_all_classes(preds, gts, iou_threshold,
                                [](const ScoredBox2D& a, const ScoredBox2D& b) { return iou2d(a, b); },
                                box_order_2d);
}

inline ApResult average_precision_3d(std::span<const Cuboid3D> preds,
                                     std::span<const Cuboid3D> gts,
                                     double iou_threshold = 0.5) {
  return detail::ap_all_classes(preds, gts, iou_threshold,
                                [](const Cuboid3D& a, const Cuboid3D& b) { return iou3d(a, b); },
                                cuboid_order);
}

// Mean 3D IoU over greedily matched prediction/ground-truth pairs.
inline double mean_matched_iou3d(std::span<const Cuboid3D> preds,
                                 std::span<const Cuboid3D> gts, double iou_threshold = 0.5) {
  const MatchResult m = match_detections_3d(preds, gts, iou_threshold);
  if (m.true_positives.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& tp : m.true_positives) sum += tp.iou;
  return sum / static_cast<double>(m.true_positives.size());
}

// --- Dice -------------------------------------------------------------------

inline Ratio dice_ratio(const Mask3D& x, const Mask3D& y) {
  if (!x.same_dims(y)) throw DimMismatch("dice: mask dimensions differ");
  std::int64_t inter = 0, cx = 0, cy = 0;
  for (std::size_t i = 0; i < x.bits.size(); ++i) {
    cx += x.bits[i];
    cy += y.bits[i];
    inter += x.bits[i] & y.bits[i];
  }
  if (cx + cy == 0) return Ratio{1, 1};  // two empty masks match perfectly
  return Ratio{2 * inter, cx + cy};
}

inline double dice(const Mask3D& x, const Mask3D& y) { return dice_ratio(x, y).value(); }

// --- dimension errors ---------------------------------------------------------

using DimsUm = std::array<Dec, 3>;  // (W, H, D) in micrometers

struct DimErrorStats {
  std::vector<DimsUm> abs_errors;  // per structure, per axis
  Dec mae;                         // mean absolute error over all axes
  Dec mse;                         // mean squared error, micrometers^2
  double rmse = 0.0;
  bool exact = true;  // false when a mean required rounding
};

inline DimErrorStats dimension_errors(std::span<const DimsUm> measured,
                                      std::span<const DimsUm> ground_truth) {
  if (measured.size() != ground_truth.size()) {
    throw LengthMismatch("dimension_errors: list lengths differ");
  }
  DimErrorStats stats;
  Dec abs_sum, sq_sum;
  for (std::size_t i = 0; i < measured.size(); ++i) {
    DimsUm err;
    for (int a = 0; a < 3; ++a) {
      const Dec e = (measured[i][static_cast<std::size_t>(a)] -
                     ground_truth[i][static_cast<std::size_t>(a)])
                        .abs();
      err[static_cast<std::size_t>(a)] = e;
      abs_sum = abs_sum + e;
      sq_sum = sq_sum + e * e;
    }
    stats.abs_errors.push_back(err);
  }
  const std::int64_t n = static_cast<std::int64_t>(measured.size()) * 3;
  if (n > 0) {
    Dec q;
    if (abs_sum.try_div(n, q)) stats.mae = q;
    else { stats.mae = abs_sum.div_rounded(n); stats.exact = false; }
    if (sq_sum.try_div(n, q)) stats.mse = q;
    else { stats.mse = sq_sum.div_rounded(n); stats.exact = false; }
    stats.rmse = std::sqrt(stats.mse.to_double());
  }
  return stats;
}

}  // namespace voxmet
