#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "invnms/oracle.hpp"
#include "invnms/suppression.hpp"

namespace invnms::bench {

/// Scene family used for timing: roughly eight boxes per cluster and an image
/// whose side grows with sqrt(n), so density stays constant as n grows.
inline oracle::SceneSpec bench_scene(std::size_t n, std::uint64_t seed) {
  oracle::SceneSpec spec;
  spec.seed = seed;
  spec.n_boxes = n;
  spec.n_clusters = std::max<std::size_t>(1, n / 8);
  const double side = 64.0 * std::sqrt(static_cast<double>(std::max<std::size_t>(n, 1)));
  spec.image_width = side;
  spec.image_height = side;
  spec.cluster_spread = 0.01 * side;
  spec.score_low = 0.05;
  spec.score_high = 1.0;
  return spec;
}

struct BenchRow {
  Method method = Method::Inverted;
  std::size_t n = 0;
  std::size_t reps = 0;
  double mean_ms = 0.0;
  double stddev_ms = 0.0;
  std::size_t kept = 0;
};

struct BenchOptions {
  std::size_t reps = 30;
  std::size_t warmup = 3;
  std::uint64_t seed = 1;
};

/// Wall-clock time of `suppress` on one generated scene; warm-up calls are
/// run first and not recorded.
inline BenchRow time_suppression(Method method, std::size_t n, const BenchOptions& opts) {
  BenchRow row;
  row.method = method;
  row.n = n;
  const std::vector<Detection> scene = oracle::generate_scene(bench_scene(n, opts.seed));
  const SuppressionConfig cfg = SuppressionConfig::defaults(method);
  if (n == 0) {
    row.reps = opts.reps;
    return row;
  }
  for (std::size_t i = 0; i < opts.warmup; ++i) row.kept = suppress(scene, cfg).kept.size();

  std::vector<double> samples;
  samples.reserve(opts.reps);
  for (std::size_t r = 0; r < opts.reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    const SuppressionResult res = suppress(scene, cfg);
    const auto t1 = std::chrono::steady_clock::now();
    row.kept = res.kept.size();
    samples.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  row.reps = samples.size();
  if (samples.empty()) return row;
  double sum = 0.0;
  for (double s : samples) sum += s;
  row.mean_ms = sum / static_cast<double>(samples.size());
  double var = 0.0;
  for (double s : samples) var += (s - row.mean_ms) * (s - row.mean_ms);
  row.stddev_ms = samples.size() > 1 ? std::sqrt(var / static_cast<double>(samples.size() - 1)) : 0.0;
  return row;
}

/// Least-squares slope of log(mean_ms) against log(n). Rows with n == 0 or
/// zero time are skipped; fewer than two usable sizes gives nullopt.
inline std::optional<double> loglog_slope(std::span<const BenchRow> rows) {
  std::vector<double> xs, ys;
  for (const BenchRow& r : rows) {
    if (r.n == 0 || !(r.mean_ms > 0.0)) continue;
    xs.push_back(std::log(static_cast<double>(r.n)));
    ys.push_back(std::log(r.mean_ms));
  }
  if (xs.size() < 2) return std::nullopt;
  const double k = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= k;
  my /= k;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  if (!(sxx > 0.0)) return std::nullopt;
  return sxy / sxx;
}

}  // namespace invnms::bench
