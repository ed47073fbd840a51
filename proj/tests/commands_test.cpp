#include "invnms/commands.hpp"

#include <filesystem>
#include <sstream>

#include <gtest/gtest.h>

namespace invnms::cmd {
namespace {

namespace fs = std::filesystem;

std::string fixture(const char* name) { return std::string(INVNMS_FIXTURE_DIR) + "/" + name; }

class CommandsTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("invnms_cmd_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string tmp(const char* name) const { return (dir_ / name).string(); }

  fs::path dir_;
  std::ostringstream out_, err_;
};

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (std::size_t p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
  return n;
}

TEST_F(CommandsTest, SuppressFig1) {
  SuppressOptions o{fixture("fig1_dets.txt"), tmp("inv.txt"), SuppressionConfig::defaults(Method::Inverted)};
  const SuppressSummary s = cmd_suppress(o, out_, err_);
  EXPECT_EQ(s.kept, 1u);
  EXPECT_EQ(s.deleted, 2u);
  EXPECT_EQ(read_file(tmp("inv.txt")), "fig1\n1\n0 0 10 10 0.9\n");

  o.cfg = SuppressionConfig::defaults(Method::Greedy);
  o.output = tmp("greedy.txt");
  EXPECT_EQ(cmd_suppress(o, out_, err_).kept, 2u);
  EXPECT_EQ(io::parse_detections(read_file(tmp("greedy.txt"))).at("fig1").size(), 2u);
  EXPECT_NE(out_.str().find("kept=2 deleted=1"), std::string::npos);
}

TEST_F(CommandsTest, SuppressEmptyFile) {
  SuppressOptions o{fixture("empty.txt"), tmp("out.txt"), SuppressionConfig::defaults(Method::Inverted)};
  EXPECT_EQ(cmd_suppress(o, out_, err_).kept, 0u);
  EXPECT_EQ(read_file(tmp("out.txt")), "");
}

TEST_F(CommandsTest, SuppressParseFailure) {
  write_file(tmp("bad.txt"), "img\n3\n0 0 1 1 0.5\n");
  SuppressOptions o{tmp("bad.txt"), tmp("out.txt"), SuppressionConfig::defaults(Method::Inverted)};
  EXPECT_THROW(cmd_suppress(o, out_, err_), InputError);
  o.input = tmp("missing.txt");
  EXPECT_THROW(cmd_suppress(o, out_, err_), InputError);
}

TEST_F(CommandsTest, EvaluatePerfect) {
  const EvalReport r = cmd_evaluate({fixture("perfect_dets.txt"), fixture("perfect_gt.txt"), 0.5, false}, out_, err_);
  for (Subset s : kAllSubsets) EXPECT_EQ(r.ap_by_subset.at(s), 1.0);
  for (SizeBucket b : kAllBuckets) {
    EXPECT_EQ(r.ap_by_bucket.at(b), 1.0);
    EXPECT_EQ(r.counts.at(std::string(bucket_name(b))).gt_positive, 1u);
  }
  EXPECT_EQ(count(out_.str(), "1.000000"), 8u);  // 3 subsets, 4 buckets, overall
}

TEST_F(CommandsTest, EvaluateFpThenTpCsv) {
  const EvalReport r = cmd_evaluate({fixture("fp_then_tp_dets.txt"), fixture("fp_then_tp_gt.txt"), 0.5, true}, out_, err_);
  EXPECT_EQ(r.ap_by_subset.at(Subset::Hard), 0.25);
  EXPECT_NE(out_.str().find("subset,hard,0.250000,2,1,1,0"), std::string::npos);
  EXPECT_NE(out_.str().find("subset,easy,,0,"), std::string::npos);
}

TEST_F(CommandsTest, EvaluateIdMismatch) {
  write_file(tmp("dets.txt"), "ghost\n1\n0 0 1 1 0.5\n");
  try {
    cmd_evaluate({tmp("dets.txt"), fixture("perfect_gt.txt"), 0.5, false}, out_, err_);
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("ghost"), std::string::npos);
  }
}

TEST_F(CommandsTest, CompareClusteredFixture) {
  CompareOptions o;
  o.detections = fixture("cluster_dets.txt");
  o.ground_truth = fixture("cluster_gt.txt");
  o.settings.methods = {Method::Greedy, Method::Inverted};
  o.settings.sweep = {0.6};
  const CompareResult fixed = cmd_compare(o, out_, err_);
  const double g = fixed.best_for(Method::Greedy).ap_by_subset.at(Subset::Hard);
  const double i = fixed.best_for(Method::Inverted).ap_by_subset.at(Subset::Hard);
  EXPECT_EQ(i, 1.0);
  EXPECT_LT(g, i);

  o.settings.sweep = {0.3, 0.4, 0.5, 0.6, 0.7};
  o.full = true;
  std::ostringstream full;
  const CompareResult swept = cmd_compare(o, full, err_);
  EXPECT_GE(swept.best_for(Method::Inverted).ap_by_subset.at(Subset::Hard),
            swept.best_for(Method::Greedy).ap_by_subset.at(Subset::Hard));
  EXPECT_EQ(swept.cells.size(), 10u);
  // Full sweep: one line per method x subset with five threshold columns.
  EXPECT_EQ(count(full.str(), "nt="), 5u);
}

TEST_F(CommandsTest, CompareSingleMethodCsv) {
  CompareOptions o;
  o.detections = fixture("cluster_dets.txt");
  o.ground_truth = fixture("cluster_gt.txt");
  o.settings.methods = {Method::Inverted};
  o.csv = true;
  cmd_compare(o, out_, err_);
  const std::string csv = out_.str();
  EXPECT_EQ(count(csv, "\n"), 2u);  // header + one best row
  EXPECT_EQ(csv.rfind("method,nt,easy,medium,hard,overall,best\ninverted,", 0), 0u);
}

TEST_F(CommandsTest, CompareDefaultsRunsAllMethods) {
  CompareOptions o;
  o.detections = fixture("perfect_dets.txt");
  o.ground_truth = fixture("perfect_gt.txt");
  const CompareResult r = cmd_compare(o, out_, err_);
  EXPECT_EQ(r.methods.size(), 5u);
  EXPECT_EQ(r.cells.size(), 25u);
  // Tied scores: the earliest threshold wins.
  EXPECT_EQ(r.best_for(Method::Greedy).nms_threshold, 0.3);
}

TEST_F(CommandsTest, BenchZeroAndSmall) {
  BenchCommandOptions o;
  o.sizes = {0, 50};
  o.methods = {Method::Inverted, Method::SoftGaussian};
  o.timing.reps = 3;
  o.timing.warmup = 1;
  const BenchReport r = cmd_bench(o, out_);
  ASSERT_EQ(r.rows.size(), 4u);
  EXPECT_EQ(r.rows[0].n, 0u);
  EXPECT_EQ(r.rows[0].mean_ms, 0.0);
  EXPECT_GT(r.rows[1].kept, 0u);
  EXPECT_FALSE(r.slopes.at(Method::Inverted).has_value());  // one usable size only
}

TEST(LogLogSlope, RecoversExponent) {
  std::vector<bench::BenchRow> rows;
  for (std::size_t n : {10u, 100u, 1000u}) {
    bench::BenchRow r;
    r.n = n;
    r.mean_ms = 3e-4 * static_cast<double>(n) * static_cast<double>(n);
    rows.push_back(r);
  }
  EXPECT_NEAR(*bench::loglog_slope(rows), 2.0, 1e-12);
}

TEST_F(CommandsTest, RenderPanes) {
  RenderOptions o;
  o.detections = fixture("fig1_dets.txt");
  o.image_id = "fig1";
  o.output = tmp("fig1.svg");
  const std::string inv = cmd_render(o, out_, err_);
  const auto after_pos = inv.find("<g id=\"pane-1\"");
  ASSERT_NE(after_pos, std::string::npos);
  EXPECT_EQ(count(inv.substr(after_pos), "<rect"), 1u);
  EXPECT_EQ(count(inv.substr(0, after_pos), "<rect"), 3u);
  EXPECT_EQ(read_file(o.output), inv);

  o.after = Method::Greedy;
  const std::string grd = cmd_render(o, out_, err_);
  EXPECT_EQ(count(grd.substr(grd.find("<g id=\"pane-1\"")), "<rect"), 2u);
  EXPECT_EQ(cmd_render(o, out_, err_), grd);  // deterministic
}

TEST_F(CommandsTest, RenderEmptyAndUnknown) {
  write_file(tmp("e.txt"), "blank\n0\n");
  RenderOptions o;
  o.detections = tmp("e.txt");
  o.image_id = "blank";
  o.output = tmp("e.svg");
  const std::string svg = cmd_render(o, out_, err_);
  EXPECT_EQ(count(svg, "<rect"), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  o.image_id = "nope";
  EXPECT_THROW(cmd_render(o, out_, err_), InputError);
}

}  // namespace
}  // namespace invnms::cmd
