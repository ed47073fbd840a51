#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "invnms/geometry.hpp"
#include "invnms/suppression.hpp"

namespace invnms {

enum class Subset { Easy, Medium, Hard };
inline constexpr std::array<Subset, 3> kAllSubsets = {Subset::Easy, Subset::Medium, Subset::Hard};

inline std::string_view subset_name(Subset s) noexcept {
  switch (s) {
    case Subset::Easy: return "easy";
    case Subset::Medium: return "medium";
    case Subset::Hard: return "hard";
  }
  return "?";
}

/// Buckets over the longer side of a ground-truth box, right-closed:
/// [0,16], (16,64], (64,256], (256,inf).
enum class SizeBucket { UpTo16, UpTo64, UpTo256, Above256 };
inline constexpr std::array<SizeBucket, 4> kAllBuckets = {SizeBucket::UpTo16, SizeBucket::UpTo64,
                                                          SizeBucket::UpTo256, SizeBucket::Above256};

inline std::string_view bucket_name(SizeBucket b) noexcept {
  switch (b) {
    case SizeBucket::UpTo16: return "<=16";
    case SizeBucket::UpTo64: return "(16,64]";
    case SizeBucket::UpTo256: return "(64,256]";
    case SizeBucket::Above256: return ">256";
  }
  return "?";
}

inline SizeBucket size_bucket(double longer_side) noexcept {
  if (longer_side <= 16.0) return SizeBucket::UpTo16;
  if (longer_side <= 64.0) return SizeBucket::UpTo64;
  if (longer_side <= 256.0) return SizeBucket::UpTo256;
  return SizeBucket::Above256;
}

struct SubsetTags {
  bool easy = false;
  bool medium = false;
  bool hard = false;

  bool has(Subset s) const noexcept {
    switch (s) {
      case Subset::Easy: return easy;
      case Subset::Medium: return medium;
      case Subset::Hard: return hard;
    }
    return false;
  }
  void set(Subset s) noexcept {
    switch (s) {
      case Subset::Easy: easy = true; break;
      case Subset::Medium: medium = true; break;
      case Subset::Hard: hard = true; break;
    }
  }
  bool empty() const noexcept { return !easy && !medium && !hard; }
  friend bool operator==(const SubsetTags&, const SubsetTags&) = default;
};

struct GroundTruthBox {
  BoundingBox box;
  SubsetTags subsets;
  bool ignore = false;

  friend bool operator==(const GroundTruthBox&, const GroundTruthBox&) = default;
};

enum class MatchLabel { TruePositive, FalsePositive, Ignored };

struct ImageMatch {
  std::vector<MatchLabel> labels;  // parallel to the detection input
  std::vector<bool> gt_matched;    // parallel to the GT input
};

/// Score-ordered greedy matching. Each detection (best first) takes the
/// unmatched, non-ignored GT with the highest IoU >= iou_match. Failing
/// that, a detection overlapping an ignored GT at >= iou_match is Ignored;
/// otherwise it is a false positive.
inline ImageMatch match_image(std::span<const Detection> dets, std::span<const GroundTruthBox> gts,
                              double iou_match = 0.5) {
  if (!(iou_match > 0.0 && iou_match < 1.0)) {
    throw std::invalid_argument("iou_match must lie in (0, 1)");
  }
  ImageMatch m;
  m.labels.assign(dets.size(), MatchLabel::FalsePositive);
  m.gt_matched.assign(gts.size(), false);

  std::vector<std::size_t> order(dets.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return ranks_above(dets[a], dets[b]); });

  for (std::size_t di : order) {
    const BoundingBox& box = dets[di].box;
    double best = -1.0;
    std::size_t best_gt = gts.size();
    double best_ignored = -1.0;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      const double overlap = iou(box, gts[g].box);
      if (gts[g].ignore) {
        best_ignored = std::max(best_ignored, overlap);
      } else if (!m.gt_matched[g] && overlap >= iou_match && overlap > best) {
        best = overlap;
        best_gt = g;
      }
    }
    if (best_gt < gts.size()) {
      m.labels[di] = MatchLabel::TruePositive;
      m.gt_matched[best_gt] = true;
    } else if (best_ignored >= iou_match) {
      m.labels[di] = MatchLabel::Ignored;
    }
  }
  return m;
}

struct LabeledDetection {
  double score = 0.0;
  MatchLabel label = MatchLabel::FalsePositive;
};

struct PrPoint {
  double recall = 0.0;
  double precision = 0.0;
};

/// Cumulative (recall, precision) after each non-ignored detection in
/// descending score order. The sort is stable, so equal scores keep merge order.
inline std::vector<PrPoint> pr_curve(std::vector<LabeledDetection> dets, std::size_t total_gt) {
  std::stable_sort(dets.begin(), dets.end(),
                   [](const LabeledDetection& a, const LabeledDetection& b) { return a.score > b.score; });
  std::vector<PrPoint> curve;
  std::size_t tp = 0, fp = 0;
  for (const LabeledDetection& d : dets) {
    if (d.label == MatchLabel::Ignored) continue;
    (d.label == MatchLabel::TruePositive ? tp : fp) += 1;
    curve.push_back({total_gt == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(total_gt),
                     static_cast<double>(tp) / static_cast<double>(tp + fp)});
  }
  return curve;
}

/// All-points interpolated AP: area under the monotone precision envelope.
inline std::optional<double> average_precision_from_curve(std::span<const PrPoint> curve,
                                                          std::size_t total_gt) {
  if (total_gt == 0) return std::nullopt;
  std::vector<double> rec{0.0}, prec{0.0};
  for (const PrPoint& p : curve) {
    rec.push_back(p.recall);
    prec.push_back(p.precision);
  }
  rec.push_back(1.0);
  prec.push_back(0.0);
  for (std::size_t i = prec.size() - 1; i-- > 0;) prec[i] = std::max(prec[i], prec[i + 1]);
  double ap = 0.0;
  for (std::size_t i = 0; i + 1 < rec.size(); ++i) ap += (rec[i + 1] - rec[i]) * prec[i + 1];
  return std::clamp(ap, 0.0, 1.0);
}

/// Absent (nullopt) when there is no positive ground truth.
inline std::optional<double> average_precision(std::vector<LabeledDetection> dets,
                                               std::size_t total_gt) {
  const std::vector<PrPoint> curve = pr_curve(std::move(dets), total_gt);
  return average_precision_from_curve(curve, total_gt);
}

struct EvalCounts {
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t ignored_detections = 0;
  std::size_t gt_positive = 0;  // non-ignored GT in scope
  std::size_t gt_matched = 0;
  std::size_t gt_ignored = 0;
};

struct EvalConfig {
  double iou_match = 0.5;
};

struct EvalReport {
  std::map<Subset, double> ap_by_subset;      // absent key: no GT in that subset
  std::map<SizeBucket, double> ap_by_bucket;  // absent key: no GT in that bucket
  std::map<std::string, std::vector<PrPoint>> pr_curves;  // keyed "all", "easy", "<=16", ...
  std::map<std::string, EvalCounts> counts;
  std::optional<double> ap_overall;
};

using DetectionsByImage = std::map<std::string, std::vector<Detection>>;
using GroundTruthByImage = std::map<std::string, std::vector<GroundTruthBox>>;

namespace detail {

struct ScopeResult {
  std::vector<PrPoint> curve;
  EvalCounts counts;
  std::optional<double> ap;
};

// Evaluates with GT outside `in_scope` demoted to ignored.
template <typename InScope>
ScopeResult evaluate_scope(const DetectionsByImage& dets, const GroundTruthByImage& gts,
                           double iou_match, InScope in_scope) {
  ScopeResult r;
  std::vector<LabeledDetection> labeled;
  static const std::vector<Detection> kNoDets;
  for (const auto& [id, gt_list] : gts) {
    std::vector<GroundTruthBox> scoped = gt_list;
    for (GroundTruthBox& g : scoped) {
      if (!g.ignore && !in_scope(g)) g.ignore = true;
      (g.ignore ? r.counts.gt_ignored : r.counts.gt_positive) += 1;
    }
    const auto it = dets.find(id);
    const std::vector<Detection>& image_dets = it == dets.end() ? kNoDets : it->second;
    const ImageMatch m = match_image(image_dets, scoped, iou_match);
    for (std::size_t i = 0; i < image_dets.size(); ++i) {
      labeled.push_back({image_dets[i].score, m.labels[i]});
      switch (m.labels[i]) {
        case MatchLabel::TruePositive: ++r.counts.true_positives; break;
        case MatchLabel::FalsePositive: ++r.counts.false_positives; break;
        case MatchLabel::Ignored: ++r.counts.ignored_detections; break;
      }
    }
    r.counts.gt_matched += static_cast<std::size_t>(
        std::count(m.gt_matched.begin(), m.gt_matched.end(), true));
  }
  r.curve = pr_curve(std::move(labeled), r.counts.gt_positive);
  r.ap = average_precision_from_curve(r.curve, r.counts.gt_positive);
  return r;
}

}  // namespace detail

/// Table-shaped AP report: one AP per difficulty subset and per GT size
/// bucket, plus an overall AP. Every detection image id must exist in `gts`.
inline EvalReport evaluate(const DetectionsByImage& dets, const GroundTruthByImage& gts,
                           const EvalConfig& cfg = {}) {
  for (const auto& [id, _] : dets) {
    if (!gts.contains(id)) throw std::invalid_argument("detections reference unknown image id '" + id + "'");
  }
  EvalReport report;
  auto record = [&](const std::string& key, detail::ScopeResult r) {
    report.counts[key] = r.counts;
    report.pr_curves[key] = std::move(r.curve);
    return r.ap;
  };

  report.ap_overall =
      record("all", detail::evaluate_scope(dets, gts, cfg.iou_match, [](const GroundTruthBox&) { return true; }));
  for (Subset s : kAllSubsets) {
    auto ap = record(std::string(subset_name(s)),
                     detail::evaluate_scope(dets, gts, cfg.iou_match,
                                            [s](const GroundTruthBox& g) { return g.subsets.has(s); }));
    if (ap) report.ap_by_subset[s] = *ap;
  }
  for (SizeBucket b : kAllBuckets) {
    auto ap = record(std::string(bucket_name(b)),
                     detail::evaluate_scope(dets, gts, cfg.iou_match, [b](const GroundTruthBox& g) {
                       return size_bucket(g.box.longer_side()) == b;
                     }));
    if (ap) report.ap_by_bucket[b] = *ap;
  }
  return report;
}

}  // namespace invnms
