#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "invnms/geometry.hpp"

namespace invnms {

struct Detection {
  BoundingBox box;
  double score = 0.0;
  std::size_t input_index = 0;

  friend bool operator==(const Detection&, const Detection&) = default;
};

enum class Method { Greedy, Inverted, SoftLinear, SoftGaussian, Weighted };

inline constexpr Method kAllMethods[] = {Method::Greedy, Method::Inverted, Method::SoftLinear,
                                         Method::SoftGaussian, Method::Weighted};

inline std::string_view method_name(Method m) noexcept {
  switch (m) {
    case Method::Greedy: return "greedy";
    case Method::Inverted: return "inverted";
    case Method::SoftLinear: return "soft-linear";
    case Method::SoftGaussian: return "soft-gaussian";
    case Method::Weighted: return "weighted";
  }
  return "?";
}

inline Method parse_method(std::string_view name) {
  for (Method m : kAllMethods) {
    if (method_name(m) == name) return m;
  }
  throw std::invalid_argument("unknown suppression method '" + std::string(name) + "'");
}

/// Tuned IoU thresholds: 0.3 for linear soft-NMS, 0.6 for everything else.
inline constexpr double default_nms_threshold(Method m) noexcept {
  return m == Method::SoftLinear ? 0.3 : 0.6;
}

struct SuppressionConfig {
  Method method = Method::Inverted;
  double nms_threshold = 0.6;
  double sigma = 0.5;          // Gaussian soft-NMS width
  double score_floor = 0.001;  // soft-NMS discard threshold after rescoring

  static SuppressionConfig defaults(Method m) {
    SuppressionConfig cfg;
    cfg.method = m;
    cfg.nms_threshold = default_nms_threshold(m);
    return cfg;
  }

  void validate() const {
    if (!(nms_threshold > 0.0 && nms_threshold < 1.0)) {
      throw std::invalid_argument("nms_threshold must lie in (0, 1)");
    }
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("sigma must be > 0");
    if (!(score_floor >= 0.0) || !std::isfinite(score_floor)) {
      throw std::invalid_argument("score_floor must be >= 0");
    }
  }
};

struct SuppressionResult {
  std::vector<Detection> kept;  // score descending, ties by ascending input_index
  std::size_t deleted_count = 0;
};

/// Rank order shared by every method: higher score first, then earlier input.
inline bool ranks_above(const Detection& a, const Detection& b) noexcept {
  if (a.score != b.score) return a.score > b.score;
  return a.input_index < b.input_index;
}

namespace detail {

inline void check_detections(std::span<const Detection> dets) {
  std::vector<std::size_t> ids;
  ids.reserve(dets.size());
  for (const Detection& d : dets) {
    if (!std::isfinite(d.score)) throw std::invalid_argument("detection score is not finite");
    ids.push_back(d.input_index);
  }
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    throw std::invalid_argument("duplicate input_index in detection list");
  }
}

inline void expect_method(const SuppressionConfig& cfg, std::initializer_list<Method> allowed,
                          const char* op) {
  cfg.validate();
  if (std::find(allowed.begin(), allowed.end(), cfg.method) == allowed.end()) {
    throw std::invalid_argument(std::string(op) + ": config method '" +
                                std::string(method_name(cfg.method)) + "' not handled here");
  }
}

inline std::vector<Detection> sorted_by_rank(std::span<const Detection> dets) {
  std::vector<Detection> out(dets.begin(), dets.end());
  std::sort(out.begin(), out.end(), ranks_above);
  return out;
}

inline SuppressionResult finish(std::vector<Detection> kept, std::size_t input_size) {
  std::sort(kept.begin(), kept.end(), ranks_above);
  SuppressionResult r;
  r.deleted_count = input_size - kept.size();
  r.kept = std::move(kept);
  return r;
}

}  // namespace detail

/// Inverted NMS.
///
/// Candidates are scanned from the lowest rank upward. A candidate is deleted
/// as soon as any higher-ranked candidate overlaps it with IoU >= N_t. The
/// comparison set is the whole list, including candidates already deleted, so
/// a chain G > R > Y removes both R and Y even when G and Y barely overlap.
/// Scores and coordinates are never modified.
inline SuppressionResult inverted_nms(std::span<const Detection> dets,
                                      const SuppressionConfig& cfg) {
  detail::expect_method(cfg, {Method::Inverted}, "inverted_nms");
  detail::check_detections(dets);
  const std::size_t n = dets.size();
  // `ranked` is descending, so walking it backwards gives the ascending order;
  // everything in front of position i ranks above it.
  const std::vector<Detection> ranked = detail::sorted_by_rank(dets);
  std::vector<Detection> kept;
  for (std::size_t i = n; i-- > 0;) {
    bool deleted = false;
    for (std::size_t j = i; j-- > 0;) {
      if (iou(ranked[i].box, ranked[j].box) >= cfg.nms_threshold) {
        deleted = true;
        break;
      }
    }
    if (!deleted) kept.push_back(ranked[i]);
  }
  return detail::finish(std::move(kept), n);
}

/// Classic greedy NMS: repeatedly keep the best remaining box and drop every
/// remaining box overlapping it with IoU >= N_t.
inline SuppressionResult greedy_nms(std::span<const Detection> dets, const SuppressionConfig& cfg) {
  detail::expect_method(cfg, {Method::Greedy}, "greedy_nms");
  detail::check_detections(dets);
  const std::size_t n = dets.size();
  const std::vector<Detection> ranked = detail::sorted_by_rank(dets);
  std::vector<char> removed(n, 0);
  std::vector<Detection> kept;
  for (std::size_t i = 0; i < n; ++i) {
    if (removed[i]) continue;
    kept.push_back(ranked[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!removed[j] && iou(ranked[i].box, ranked[j].box) >= cfg.nms_threshold) removed[j] = 1;
    }
  }
  return detail::finish(std::move(kept), n);
}

/// Soft-NMS. Overlapping boxes are rescored instead of removed:
///   linear:   s <- s * (1 - iou)        only when iou >= N_t
///   gaussian: s <- s * exp(-iou^2 / sigma)  for every remaining box
/// Boxes whose final score is below score_floor are discarded.
inline SuppressionResult soft_nms(std::span<const Detection> dets, const SuppressionConfig& cfg) {
  detail::expect_method(cfg, {Method::SoftLinear, Method::SoftGaussian}, "soft_nms");
  detail::check_detections(dets);
  const std::size_t n = dets.size();
  std::vector<Detection> pool(dets.begin(), dets.end());
  std::vector<Detection> kept;
  kept.reserve(n);
  const bool gaussian = cfg.method == Method::SoftGaussian;

  while (!pool.empty()) {
    const auto best_it = std::min_element(pool.begin(), pool.end(), ranks_above);
    const Detection best = *best_it;
    // Scores only decrease, so once the best remaining score is under the
    // floor every remaining box ends under it too.
    if (best.score < cfg.score_floor) break;
    *best_it = pool.back();
    pool.pop_back();
    kept.push_back(best);
    for (Detection& d : pool) {
      const double overlap = iou(best.box, d.box);
      if (gaussian) {
        if (overlap > 0.0) d.score *= std::exp(-(overlap * overlap) / cfg.sigma);
      } else if (overlap >= cfg.nms_threshold) {
        d.score *= 1.0 - overlap;
      }
    }
  }
  return detail::finish(std::move(kept), n);
}

/// Weighted NMS. The best remaining box M absorbs every remaining box with
/// iou(M, b) >= N_t; the kept box is the mean of the cluster's corners
/// weighted by score * iou(M, b), and keeps M's score.
inline SuppressionResult weighted_nms(std::span<const Detection> dets,
                                      const SuppressionConfig& cfg) {
  detail::expect_method(cfg, {Method::Weighted}, "weighted_nms");
  detail::check_detections(dets);
  const std::size_t n = dets.size();
  const std::vector<Detection> ranked = detail::sorted_by_rank(dets);
  std::vector<char> removed(n, 0);
  std::vector<Detection> kept;
  for (std::size_t i = 0; i < n; ++i) {
    if (removed[i]) continue;
    const Detection& m = ranked[i];
    double wsum = m.score;
    double sx1 = m.score * m.box.x1(), sy1 = m.score * m.box.y1();
    double sx2 = m.score * m.box.x2(), sy2 = m.score * m.box.y2();
    for (std::size_t j = i + 1; j < n; ++j) {
      if (removed[j]) continue;
      const double overlap = iou(m.box, ranked[j].box);
      if (overlap < cfg.nms_threshold) continue;
      removed[j] = 1;
      const double w = ranked[j].score * overlap;
      const BoundingBox& b = ranked[j].box;
      wsum += w;
      sx1 += w * b.x1();
      sy1 += w * b.y1();
      sx2 += w * b.x2();
      sy2 += w * b.y2();
    }
    Detection out = m;
    // Non-positive total weight (zero or negative scores) has no meaningful
    // average; the cluster then collapses onto M unchanged.
    if (wsum > 0.0) {
      out.box = BoundingBox(sx1 / wsum, sy1 / wsum, std::max(sx1 / wsum, sx2 / wsum),
                            std::max(sy1 / wsum, sy2 / wsum));
    }
    kept.push_back(out);
  }
  return detail::finish(std::move(kept), n);
}

inline SuppressionResult suppress(std::span<const Detection> dets, const SuppressionConfig& cfg) {
  switch (cfg.method) {
    case Method::Greedy: return greedy_nms(dets, cfg);
    case Method::Inverted: return inverted_nms(dets, cfg);
    case Method::SoftLinear:
    case Method::SoftGaussian: return soft_nms(dets, cfg);
    case Method::Weighted: return weighted_nms(dets, cfg);
  }
  throw std::invalid_argument("suppress: unknown method");
}

}  // namespace invnms
