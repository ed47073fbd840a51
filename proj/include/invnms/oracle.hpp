#pragma once

// Slow reference implementations and the seeded scene generator. Only tests
// and the benchmark harness use this header.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <set>
#include <span>
#include <stdexcept>
#include <vector>

#include "invnms/geometry.hpp"
#include "invnms/suppression.hpp"

namespace invnms::oracle {

using IndexSet = std::set<std::size_t>;

/// Keeps a detection iff no detection ranked above it has iou >= nt.
/// Literal all-pairs predicate: no sorting and no early exit.
inline IndexSet oracle_inverted(std::span<const Detection> dets, double nt) {
  IndexSet kept;
  for (const Detection& d : dets) {
    bool overlapped_by_higher = false;
    for (const Detection& e : dets) {
      const bool higher = e.score > d.score || (e.score == d.score && e.input_index < d.input_index);
      if (higher && iou(d.box, e.box) >= nt) overlapped_by_higher = true;
    }
    if (!overlapped_by_higher) kept.insert(d.input_index);
  }
  return kept;
}

/// Textbook NMS with explicit list deletion: find the max by linear scan,
/// move it out, erase everything overlapping it, repeat until the list is empty.
inline IndexSet oracle_greedy(std::span<const Detection> dets, double nt) {
  std::vector<Detection> remaining(dets.begin(), dets.end());
  IndexSet kept;
  while (!remaining.empty()) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < remaining.size(); ++k) {
      const Detection& c = remaining[k];
      const Detection& b = remaining[best];
      if (c.score > b.score || (c.score == b.score && c.input_index < b.input_index)) best = k;
    }
    const Detection picked = remaining[best];
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best));
    kept.insert(picked.input_index);
    std::vector<Detection> survivors;
    for (const Detection& d : remaining) {
      if (iou(picked.box, d.box) < nt) survivors.push_back(d);
    }
    remaining = std::move(survivors);
  }
  return kept;
}

/// SplitMix64 (Steele, Lea, Flood 2014). Output sequence is fully specified:
///   state += 0x9E3779B97F4A7C15
///   z = state; z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB; return z ^ (z >> 31)
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1): top 53 bits of next().
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller on two consecutive uniforms (cosine branch only).
  double gaussian() noexcept {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t state_;
};

struct SceneSpec {
  std::uint64_t seed = 0;
  std::size_t n_boxes = 0;
  std::size_t n_clusters = 1;
  double cluster_spread = 4.0;
  double image_width = 640.0;
  double image_height = 480.0;
  double score_low = 0.0;
  double score_high = 1.0;

  void validate() const {
    if (!(image_width > 0.0) || !(image_height > 0.0)) {
      throw std::invalid_argument("SceneSpec: image size must be positive");
    }
    if (!(score_low <= score_high)) throw std::invalid_argument("SceneSpec: score_low > score_high");
    if (!(cluster_spread >= 0.0)) throw std::invalid_argument("SceneSpec: negative cluster_spread");
    if (n_boxes > 0 && n_clusters == 0) {
      throw std::invalid_argument("SceneSpec: boxes requested with zero clusters");
    }
  }
};

/// Deterministic clustered scene. Draw order (all from one SplitMix64(seed)):
///   per cluster c:  cx = U*W, cy = U*H, side = (0.04 + 0.12*U) * min(W, H)
///   per box k (cluster k mod n_clusters):
///     dx, dy = N*spread; dw, dh = N*spread/2; score = low + (high-low)*U
///   box = centre (cx+dx, cy+dy), size max(1, side+dw) x max(1, side+dh),
///   clipped to [0,W] x [0,H]; input_index = k.
inline std::vector<Detection> generate_scene(const SceneSpec& spec) {
  spec.validate();
  SplitMix64 rng(spec.seed);
  struct Cluster {
    double cx, cy, side;
  };
  std::vector<Cluster> clusters;
  const std::size_t nc = spec.n_boxes == 0 ? 0 : spec.n_clusters;
  clusters.reserve(nc);
  const double min_dim = std::min(spec.image_width, spec.image_height);
  for (std::size_t c = 0; c < nc; ++c) {
    const double cx = rng.uniform() * spec.image_width;
    const double cy = rng.uniform() * spec.image_height;
    const double side = (0.04 + 0.12 * rng.uniform()) * min_dim;
    clusters.push_back({cx, cy, side});
  }

  std::vector<Detection> out;
  out.reserve(spec.n_boxes);
  for (std::size_t k = 0; k < spec.n_boxes; ++k) {
    const Cluster& c = clusters[k % nc];
    const double dx = rng.gaussian() * spec.cluster_spread;
    const double dy = rng.gaussian() * spec.cluster_spread;
    const double dw = rng.gaussian() * spec.cluster_spread * 0.5;
    const double dh = rng.gaussian() * spec.cluster_spread * 0.5;
    const double score = spec.score_low + (spec.score_high - spec.score_low) * rng.uniform();
    const double w = std::max(1.0, c.side + dw);
    const double h = std::max(1.0, c.side + dh);
    const double mx = c.cx + dx;
    const double my = c.cy + dy;
    auto clamp_x = [&](double v) { return std::clamp(v, 0.0, spec.image_width); };
    auto clamp_y = [&](double v) { return std::clamp(v, 0.0, spec.image_height); };
    out.push_back(Detection{BoundingBox(clamp_x(mx - w / 2), clamp_y(my - h / 2),
                                        clamp_x(mx + w / 2), clamp_y(my + h / 2)),
                            score, k});
  }
  return out;
}

}  // namespace invnms::oracle
