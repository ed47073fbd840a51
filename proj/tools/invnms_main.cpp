// invnms: suppression, evaluation, comparison, benchmarking and SVG overlays
// for bounding-box detections stored in block text files.
//
// Exit codes: 0 success, 1 usage error, 2 input/parse error.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "invnms/commands.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

invnms::Method method_or_usage(const std::string& name) {
  try {
    return invnms::parse_method(name);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

std::optional<invnms::Method> optional_method(const std::string& name) {
  if (name == "none" || name == "input") return std::nullopt;
  return method_or_usage(name);
}

std::vector<invnms::Method> methods_or_usage(const std::vector<std::string>& names) {
  std::vector<invnms::Method> out;
  for (const std::string& n : names) out.push_back(method_or_usage(n));
  return out;
}

void check_threshold(double nt, const char* flag) {
  if (!(nt > 0.0 && nt < 1.0)) throw UsageError(std::string(flag) + " must lie in (0, 1)");
}

std::string method_list() {
  std::string s;
  for (invnms::Method m : invnms::kAllMethods) {
    if (!s.empty()) s += ", ";
    s += invnms::method_name(m);
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bounding-box suppression (greedy, inverted, soft, weighted NMS) and AP evaluation"};
  app.require_subcommand(1);

  // suppress
  std::string sup_in, sup_out, sup_method = "inverted";
  std::optional<double> sup_nt;
  double sup_sigma = 0.5, sup_floor = 0.001;
  auto* suppress = app.add_subcommand("suppress", "Run one suppression method over a detection file");
  suppress->add_option("-i,--input", sup_in, "Detection file")->required();
  suppress->add_option("-o,--output", sup_out, "Output detection file")->required();
  suppress->add_option("-m,--method", sup_method, "One of: " + method_list())->capture_default_str();
  suppress->add_option("--nt", sup_nt, "IoU threshold (default 0.3 soft-linear, 0.6 otherwise)");
  suppress->add_option("--sigma", sup_sigma, "Gaussian soft-NMS width")->capture_default_str();
  suppress->add_option("--score-floor", sup_floor, "Soft-NMS discard threshold")->capture_default_str();

  // evaluate
  std::string ev_dets, ev_gt;
  double ev_iou = 0.5;
  bool ev_csv = false;
  auto* evaluate = app.add_subcommand("evaluate", "AP per difficulty subset and per GT size bucket");
  evaluate->add_option("-d,--detections", ev_dets, "Detection file")->required();
  evaluate->add_option("-g,--gt", ev_gt, "Ground-truth file")->required();
  evaluate->add_option("--iou", ev_iou, "Matching IoU threshold")->capture_default_str();
  evaluate->add_flag("--csv", ev_csv, "Emit CSV");

  // compare
  std::string cmp_dets, cmp_gt;
  std::vector<std::string> cmp_methods;
  std::vector<double> cmp_sweep{0.3, 0.4, 0.5, 0.6, 0.7};
  double cmp_sigma = 0.5, cmp_floor = 0.001, cmp_iou = 0.5;
  bool cmp_full = false, cmp_csv = false;
  auto* compare = app.add_subcommand("compare", "Suppress with each method and threshold, then evaluate");
  compare->add_option("-d,--detections", cmp_dets, "Raw (pre-suppression) detection file")->required();
  compare->add_option("-g,--gt", cmp_gt, "Ground-truth file")->required();
  compare->add_option("--methods", cmp_methods, "Methods to compare (default: all)")->delimiter(',');
  compare->add_option("--nt-sweep", cmp_sweep, "IoU thresholds to try")->delimiter(',')->capture_default_str();
  compare->add_option("--sigma", cmp_sigma, "Gaussian soft-NMS width")->capture_default_str();
  compare->add_option("--score-floor", cmp_floor, "Soft-NMS discard threshold")->capture_default_str();
  compare->add_option("--iou", cmp_iou, "Matching IoU threshold")->capture_default_str();
  compare->add_flag("--full", cmp_full, "Also print the full threshold sweep");
  compare->add_flag("--csv", cmp_csv, "Emit CSV");

  // bench
  std::vector<std::size_t> bench_sizes{100, 300, 1000, 3000};
  std::vector<std::string> bench_methods;
  invnms::bench::BenchOptions bench_timing;
  auto* bench = app.add_subcommand("bench", "Time suppression on generated clustered scenes");
  bench->add_option("--sizes", bench_sizes, "Box counts")->delimiter(',')->capture_default_str();
  bench->add_option("--methods", bench_methods, "Methods to time (default: all)")->delimiter(',');
  bench->add_option("--seed", bench_timing.seed, "Scene seed")->capture_default_str();
  bench->add_option("--reps", bench_timing.reps, "Timed repetitions")->capture_default_str()->check(CLI::PositiveNumber);
  bench->add_option("--warmup", bench_timing.warmup, "Untimed warm-up calls")->capture_default_str();

  // render
  std::string ren_dets, ren_id, ren_out, ren_before = "none", ren_after = "inverted";
  std::optional<double> ren_nt;
  double ren_sigma = 0.5, ren_floor = 0.001;
  auto* render = app.add_subcommand("render", "Draw one image's boxes before and after suppression as SVG");
  render->add_option("-d,--detections", ren_dets, "Detection file")->required();
  render->add_option("--image-id", ren_id, "Image id to draw")->required();
  render->add_option("-o,--output", ren_out, "Output SVG path")->required();
  render->add_option("--before", ren_before, "Method for the left pane, or 'none'")->capture_default_str();
  render->add_option("--after", ren_after, "Method for the right pane, or 'none'")->capture_default_str();
  render->add_option("--nt", ren_nt, "IoU threshold override");
  render->add_option("--sigma", ren_sigma)->capture_default_str();
  render->add_option("--score-floor", ren_floor)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (suppress->parsed()) {
      invnms::cmd::SuppressOptions o;
      o.input = sup_in;
      o.output = sup_out;
      o.cfg = invnms::SuppressionConfig::defaults(method_or_usage(sup_method));
      if (sup_nt) o.cfg.nms_threshold = *sup_nt;
      o.cfg.sigma = sup_sigma;
      o.cfg.score_floor = sup_floor;
      try {
        o.cfg.validate();
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      invnms::cmd::cmd_suppress(o, std::cout, std::cerr);
    } else if (evaluate->parsed()) {
      check_threshold(ev_iou, "--iou");
      invnms::cmd::cmd_evaluate({ev_dets, ev_gt, ev_iou, ev_csv}, std::cout, std::cerr);
    } else if (compare->parsed()) {
      invnms::cmd::CompareOptions o;
      o.detections = cmp_dets;
      o.ground_truth = cmp_gt;
      if (!cmp_methods.empty()) o.settings.methods = methods_or_usage(cmp_methods);
      if (cmp_sweep.empty()) throw UsageError("--nt-sweep needs at least one threshold");
      for (double nt : cmp_sweep) check_threshold(nt, "--nt-sweep");
      check_threshold(cmp_iou, "--iou");
      if (!(cmp_sigma > 0.0)) throw UsageError("--sigma must be > 0");
      if (!(cmp_floor >= 0.0)) throw UsageError("--score-floor must be >= 0");
      o.settings.sweep = cmp_sweep;
      o.settings.sigma = cmp_sigma;
      o.settings.score_floor = cmp_floor;
      o.settings.iou_match = cmp_iou;
      o.full = cmp_full;
      o.csv = cmp_csv;
      invnms::cmd::cmd_compare(o, std::cout, std::cerr);
    } else if (bench->parsed()) {
      invnms::cmd::BenchCommandOptions o;
      o.sizes = bench_sizes;
      if (!bench_methods.empty()) o.methods = methods_or_usage(bench_methods);
      o.timing = bench_timing;
      invnms::cmd::cmd_bench(o, std::cout);
    } else if (render->parsed()) {
      invnms::cmd::RenderOptions o;
      o.detections = ren_dets;
      o.image_id = ren_id;
      o.output = ren_out;
      o.before = optional_method(ren_before);
      o.after = optional_method(ren_after);
      if (ren_nt) check_threshold(*ren_nt, "--nt");
      o.nms_threshold = ren_nt;
      o.sigma = ren_sigma;
      o.score_floor = ren_floor;
      invnms::cmd::cmd_render(o, std::cout, std::cerr);
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const invnms::cmd::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return 0;
}
