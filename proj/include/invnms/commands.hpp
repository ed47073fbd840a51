#pragma once

// Subcommand implementations behind the `invnms` executable. Each takes an
// options struct, writes human output to `out`, and throws InputError for
// unreadable or inconsistent inputs (exit code 2 in the CLI).

#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "invnms/bench.hpp"
#include "invnms/dataio.hpp"
#include "invnms/evaluation.hpp"
#include "invnms/suppression.hpp"
#include "invnms/svg.hpp"

namespace invnms::cmd {

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << contents;
  if (!out) throw InputError("write failed for '" + path + "'");
}

inline DetectionsByImage load_detections(const std::string& path, std::ostream* warn = nullptr) {
  const std::string text = read_file(path);
  std::vector<std::string> warnings;
  try {
    DetectionsByImage d = io::parse_detections(text, &warnings);
    if (warn) {
      for (const std::string& w : warnings) *warn << "warning: " << path << ": " << w << '\n';
    }
    return d;
  } catch (const io::ParseError& e) {
    throw InputError(path + ": " + e.what());
  }
}

inline GroundTruthByImage load_ground_truth(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return io::parse_ground_truth(text);
  } catch (const io::ParseError& e) {
    throw InputError(path + ": " + e.what());
  }
}

inline std::string fmt_fixed(double v, int digits) {
  char buf[48];
  if (v == 0.0) v = 0.0;
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline std::string fmt_ap(std::optional<double> ap) { return ap ? fmt_fixed(*ap, 6) : "-"; }

inline std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

// ---------------------------------------------------------------- suppress

struct SuppressSummary {
  std::size_t images = 0;
  std::size_t kept = 0;
  std::size_t deleted = 0;
};

inline DetectionsByImage suppress_all(const DetectionsByImage& dets, const SuppressionConfig& cfg,
                                      SuppressSummary* summary = nullptr) {
  DetectionsByImage out;
  for (const auto& [id, list] : dets) {
    SuppressionResult r = suppress(list, cfg);
    if (summary) {
      summary->images += 1;
      summary->kept += r.kept.size();
      summary->deleted += r.deleted_count;
    }
    out.emplace(id, std::move(r.kept));
  }
  return out;
}

struct SuppressOptions {
  std::string input;
  std::string output;
  SuppressionConfig cfg;
};

inline SuppressSummary cmd_suppress(const SuppressOptions& opts, std::ostream& out,
                                    std::ostream& err) {
  const DetectionsByImage dets = load_detections(opts.input, &err);
  SuppressSummary s;
  const DetectionsByImage kept = suppress_all(dets, opts.cfg, &s);
  write_file(opts.output, io::write_detections(kept));
  out << "method=" << method_name(opts.cfg.method) << " nt=" << fmt_fixed(opts.cfg.nms_threshold, 2)
      << " images=" << s.images << " kept=" << s.kept << " deleted=" << s.deleted << '\n';
  return s;
}

// ---------------------------------------------------------------- evaluate

inline std::string format_report(const EvalReport& r, bool csv) {
  std::ostringstream os;
  auto opt_subset = [&](Subset s) -> std::optional<double> {
    auto it = r.ap_by_subset.find(s);
    return it == r.ap_by_subset.end() ? std::nullopt : std::optional<double>(it->second);
  };
  auto opt_bucket = [&](SizeBucket b) -> std::optional<double> {
    auto it = r.ap_by_bucket.find(b);
    return it == r.ap_by_bucket.end() ? std::nullopt : std::optional<double>(it->second);
  };
  auto counts = [&](const std::string& key) {
    auto it = r.counts.find(key);
    return it == r.counts.end() ? EvalCounts{} : it->second;
  };

  if (csv) {
    os << "scope,key,ap,gt,tp,fp,ignored\n";
    auto row = [&](const char* scope, const std::string& key, std::optional<double> ap) {
      const EvalCounts c = counts(key);
      os << scope << ',' << key << ',' << (ap ? fmt_fixed(*ap, 6) : "") << ',' << c.gt_positive
         << ',' << c.true_positives << ',' << c.false_positives << ',' << c.ignored_detections << '\n';
    };
    row("overall", "all", r.ap_overall);
    for (Subset s : kAllSubsets) row("subset", std::string(subset_name(s)), opt_subset(s));
    for (SizeBucket b : kAllBuckets) row("bucket", std::string(bucket_name(b)), opt_bucket(b));
    return os.str();
  }

  os << pad("subset", 10) << pad("AP", 10) << "GT\n";
  for (Subset s : kAllSubsets) {
    const std::string key(subset_name(s));
    os << pad(key, 10) << pad(fmt_ap(opt_subset(s)), 10) << counts(key).gt_positive << '\n';
  }
  os << '\n' << pad("longer side", 12) << pad("AP", 10) << "GT\n";
  for (SizeBucket b : kAllBuckets) {
    const std::string key(bucket_name(b));
    os << pad(key, 12) << pad(fmt_ap(opt_bucket(b)), 10) << counts(key).gt_positive << '\n';
  }
  const EvalCounts all = counts("all");
  os << '\n'
     << "overall AP " << fmt_ap(r.ap_overall) << "  tp=" << all.true_positives
     << " fp=" << all.false_positives << " ignored=" << all.ignored_detections
     << " gt=" << all.gt_positive << " gt_ignored=" << all.gt_ignored << '\n';
  return os.str();
}

struct EvaluateOptions {
  std::string detections;
  std::string ground_truth;
  double iou_match = 0.5;
  bool csv = false;
};

inline EvalReport evaluate_checked(const DetectionsByImage& dets, const GroundTruthByImage& gts,
                                   double iou_match) {
  try {
    return evaluate(dets, gts, EvalConfig{iou_match});
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
}

inline EvalReport cmd_evaluate(const EvaluateOptions& opts, std::ostream& out, std::ostream& err) {
  const DetectionsByImage dets = load_detections(opts.detections, &err);
  const GroundTruthByImage gts = load_ground_truth(opts.ground_truth);
  EvalReport r = evaluate_checked(dets, gts, opts.iou_match);
  out << format_report(r, opts.csv);
  return r;
}

// ---------------------------------------------------------------- compare

struct CompareCell {
  Method method = Method::Greedy;
  double nms_threshold = 0.0;
  std::map<Subset, double> ap_by_subset;
  std::optional<double> ap_overall;
};

struct CompareResult {
  std::vector<Method> methods;
  std::vector<double> sweep;
  std::vector<CompareCell> cells;  // method-major, sweep-minor
  std::vector<std::size_t> best;   // index into cells, one per method

  const CompareCell& best_for(Method m) const {
    for (std::size_t i = 0; i < methods.size(); ++i) {
      if (methods[i] == m) return cells[best[i]];
    }
    throw std::out_of_range("method not compared");
  }
};

/// Mean AP over subsets present in the report, falling back to overall AP.
inline double selection_score(const CompareCell& c) {
  if (c.ap_by_subset.empty()) return c.ap_overall.value_or(0.0);
  double sum = 0.0;
  for (const auto& [_, ap] : c.ap_by_subset) sum += ap;
  return sum / static_cast<double>(c.ap_by_subset.size());
}

struct CompareSettings {
  std::vector<Method> methods{std::begin(kAllMethods), std::end(kAllMethods)};
  std::vector<double> sweep{0.3, 0.4, 0.5, 0.6, 0.7};
  double sigma = 0.5;
  double score_floor = 0.001;
  double iou_match = 0.5;
};

inline CompareResult run_compare(const DetectionsByImage& dets, const GroundTruthByImage& gts,
                                 const CompareSettings& s) {
  if (s.methods.empty()) throw std::invalid_argument("compare: no methods requested");
  if (s.sweep.empty()) throw std::invalid_argument("compare: empty threshold sweep");
  CompareResult res;
  res.methods = s.methods;
  res.sweep = s.sweep;
  for (Method m : s.methods) {
    std::size_t best = res.cells.size();
    for (double nt : s.sweep) {
      SuppressionConfig cfg;
      cfg.method = m;
      cfg.nms_threshold = nt;
      cfg.sigma = s.sigma;
      cfg.score_floor = s.score_floor;
      const EvalReport r = evaluate_checked(suppress_all(dets, cfg), gts, s.iou_match);
      res.cells.push_back(CompareCell{m, nt, r.ap_by_subset, r.ap_overall});
      // Strictly-greater keeps the earliest threshold on ties.
      if (selection_score(res.cells.back()) > selection_score(res.cells[best])) {
        best = res.cells.size() - 1;
      }
    }
    res.best.push_back(best);
  }
  return res;
}

inline std::string format_compare(const CompareResult& r, bool full, bool csv) {
  std::ostringstream os;
  auto ap_of = [](const CompareCell& c, Subset s) -> std::optional<double> {
    auto it = c.ap_by_subset.find(s);
    return it == c.ap_by_subset.end() ? std::nullopt : std::optional<double>(it->second);
  };
  if (csv) {
    os << "method,nt,easy,medium,hard,overall,best\n";
    for (std::size_t mi = 0; mi < r.methods.size(); ++mi) {
      for (std::size_t k = 0; k < r.sweep.size(); ++k) {
        const std::size_t idx = mi * r.sweep.size() + k;
        const bool is_best = r.best[mi] == idx;
        if (!full && !is_best) continue;
        const CompareCell& c = r.cells[idx];
        os << method_name(c.method) << ',' << fmt_fixed(c.nms_threshold, 2);
        for (Subset s : kAllSubsets) {
          auto ap = ap_of(c, s);
          os << ',' << (ap ? fmt_fixed(*ap, 6) : "");
        }
        os << ',' << (c.ap_overall ? fmt_fixed(*c.ap_overall, 6) : "") << ',' << (is_best ? 1 : 0)
           << '\n';
      }
    }
    return os.str();
  }

  os << pad("method", 15) << pad("best nt", 9);
  for (Subset s : kAllSubsets) os << pad(std::string(subset_name(s)), 10);
  os << "overall\n";
  for (std::size_t mi = 0; mi < r.methods.size(); ++mi) {
    const CompareCell& c = r.cells[r.best[mi]];
    os << pad(std::string(method_name(c.method)), 15) << pad(fmt_fixed(c.nms_threshold, 2), 9);
    for (Subset s : kAllSubsets) os << pad(fmt_ap(ap_of(c, s)), 10);
    os << fmt_ap(c.ap_overall) << '\n';
  }
  if (!full) return os.str();

  os << '\n' << pad("method", 15) << pad("subset", 8);
  for (double nt : r.sweep) os << pad("nt=" + fmt_fixed(nt, 2), 10);
  os << '\n';
  for (std::size_t mi = 0; mi < r.methods.size(); ++mi) {
    for (Subset s : kAllSubsets) {
      os << pad(std::string(method_name(r.methods[mi])), 15) << pad(std::string(subset_name(s)), 8);
      for (std::size_t k = 0; k < r.sweep.size(); ++k) {
        os << pad(fmt_ap(ap_of(r.cells[mi * r.sweep.size() + k], s)), 10);
      }
      os << '\n';
    }
  }
  return os.str();
}

struct CompareOptions {
  std::string detections;
  std::string ground_truth;
  CompareSettings settings;
  bool full = false;
  bool csv = false;
};

inline CompareResult cmd_compare(const CompareOptions& opts, std::ostream& out, std::ostream& err) {
  const DetectionsByImage dets = load_detections(opts.detections, &err);
  const GroundTruthByImage gts = load_ground_truth(opts.ground_truth);
  CompareResult r = run_compare(dets, gts, opts.settings);
  out << format_compare(r, opts.full, opts.csv);
  return r;
}

// ---------------------------------------------------------------- bench

struct BenchCommandOptions {
  std::vector<std::size_t> sizes{100, 300, 1000, 3000};
  std::vector<Method> methods{std::begin(kAllMethods), std::end(kAllMethods)};
  bench::BenchOptions timing;
};

struct BenchReport {
  std::vector<bench::BenchRow> rows;
  std::map<Method, std::optional<double>> slopes;
};

inline BenchReport cmd_bench(const BenchCommandOptions& opts, std::ostream& out) {
  BenchReport rep;
  out << pad("method", 15) << pad("n", 8) << pad("reps", 6) << pad("mean_ms", 12)
      << pad("stddev_ms", 12) << "kept\n";
  for (Method m : opts.methods) {
    std::vector<bench::BenchRow> rows;
    for (std::size_t n : opts.sizes) {
      const bench::BenchRow row = bench::time_suppression(m, n, opts.timing);
      out << pad(std::string(method_name(m)), 15) << pad(std::to_string(row.n), 8)
          << pad(std::to_string(row.reps), 6) << pad(fmt_fixed(row.mean_ms, 4), 12)
          << pad(fmt_fixed(row.stddev_ms, 4), 12) << row.kept << '\n';
      rows.push_back(row);
    }
    rep.slopes[m] = bench::loglog_slope(rows);
    rep.rows.insert(rep.rows.end(), rows.begin(), rows.end());
  }
  out << '\n';
  for (Method m : opts.methods) {
    const auto& s = rep.slopes[m];
    out << "slope " << pad(std::string(method_name(m)), 15) << (s ? fmt_fixed(*s, 3) : "-") << '\n';
  }
  return rep;
}

// ---------------------------------------------------------------- render

struct RenderOptions {
  std::string detections;
  std::string image_id;
  std::optional<Method> before;  // nullopt: raw input
  std::optional<Method> after = Method::Inverted;
  std::string output;
  std::optional<double> nms_threshold;  // nullopt: per-method default
  double sigma = 0.5;
  double score_floor = 0.001;
};

inline std::string cmd_render(const RenderOptions& opts, std::ostream& out, std::ostream& err) {
  const DetectionsByImage dets = load_detections(opts.detections, &err);
  const auto it = dets.find(opts.image_id);
  if (it == dets.end()) throw InputError("image id '" + opts.image_id + "' not found in " + opts.detections);

  auto apply = [&](std::optional<Method> m) {
    if (!m) return it->second;
    SuppressionConfig cfg = SuppressionConfig::defaults(*m);
    if (opts.nms_threshold) cfg.nms_threshold = *opts.nms_threshold;
    cfg.sigma = opts.sigma;
    cfg.score_floor = opts.score_floor;
    return suppress(it->second, cfg).kept;
  };
  auto label = [](std::optional<Method> m) { return m ? std::string(method_name(*m)) : std::string("input"); };
  const std::vector<Detection> before = apply(opts.before);
  const std::vector<Detection> after = apply(opts.after);
  const svg::Pane panes[] = {{"before: " + label(opts.before), before},
                             {"after: " + label(opts.after), after}};
  std::string doc = svg::render(panes);
  write_file(opts.output, doc);
  out << "image=" << opts.image_id << " before=" << before.size() << " after=" << after.size() << '\n';
  return doc;
}

}  // namespace invnms::cmd
