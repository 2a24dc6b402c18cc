// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "maskmetrics/ap.hpp"
#include "maskmetrics/dataset_io.hpp"
#include "maskmetrics/evaluate.hpp"
#include "maskmetrics/mask.hpp"
#include "maskmetrics/oracle.hpp"
#include "maskmetrics/report.hpp"
#include "test_support.hpp"

namespace mm = maskmetrics;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool condition, const std::string& what) {
    if (!condition && pass) {
      pass = false;
      detail = what;
    }
  }
};

bool same_bits(double a, double b) {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

// Bitwise equality of every floating-point field, plus the counters.
bool same_result(const mm::ApResult& a, const mm::ApResult& b) {
  if (!same_bits(a.ap, b.ap) || a.num_tp != b.num_tp ||
      a.num_predictions != b.num_predictions || a.degenerate != b.degenerate ||
      a.pr_points.size() != b.pr_points.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.pr_points.size(); ++i) {
    if (!same_bits(a.pr_points[i].precision, b.pr_points[i].precision) ||
        !same_bits(a.pr_points[i].recall, b.pr_points[i].recall)) {
      return false;
    }
  }
  return true;
}

Outcome rle_round_trip() {
  Outcome out;
  std::mt19937_64 rng(1001);
  std::uniform_real_distribution<double> density(0.0, 1.0);
  const auto start = Clock::now();
  for (int i = 0; i < 1000; ++i) {
    const mm::ImageSize size = mm::testing::random_size(rng, 128);
    double d = density(rng);
    if (i % 50 == 0) d = 0.0;
    if (i % 50 == 1) d = 1.0;
    const mm::BitMask m = i % 4 == 3
                              ? mm::testing::random_runs_bitmask(rng, size)
                              : mm::testing::random_bitmask(rng, size, d);
    out.require(mm::decode_rle(mm::encode_rle(m)) == m,
                "round trip mismatch at case " + std::to_string(i));
  }
  const double elapsed = seconds_since(start);
  out.require(elapsed < 5.0, "took " + std::to_string(elapsed) + " s");
  out.detail = out.pass ? "1000 masks up to 128x128 in " +
                              std::to_string(elapsed) + " s"
                        : out.detail;
  return out;
}

Outcome iou_oracle_equivalence() {
  Outcome out;
  std::mt19937_64 rng(1002);
  std::uniform_real_distribution<double> density(0.0, 1.0);
  const auto start = Clock::now();
  for (int i = 0; i < 1000; ++i) {
    const mm::ImageSize size = mm::testing::random_size(rng, 128);
    const mm::BitMask a = i % 3 == 0
                              ? mm::testing::random_runs_bitmask(rng, size)
                              : mm::testing::random_bitmask(rng, size, density(rng));
    const mm::BitMask b = i % 5 == 0
                              ? a
                              : mm::testing::random_bitmask(rng, size, density(rng));
    const mm::RleMask ra = mm::encode_rle(a);
    const mm::RleMask rb = mm::encode_rle(b);
    const mm::OverlapCounts fast = mm::overlap(ra, rb);
    const mm::OverlapCounts slow = mm::oracle::oracle_overlap(a, b);
    out.require(fast == slow,
                "integer counts differ at case " + std::to_string(i));
    out.require(same_bits(mm::iou(ra, rb), mm::oracle::oracle_iou(a, b)),
                "IoU differs at case " + std::to_string(i));
  }
  const double elapsed = seconds_since(start);
  out.require(elapsed < 10.0, "took " + std::to_string(elapsed) + " s");
  if (out.pass) out.detail = "1000 pairs exact in " + std::to_string(elapsed) + " s";
  return out;
}

Outcome ap_oracle_equivalence() {
  Outcome out;
  std::mt19937_64 rng(1003);
  const auto start = Clock::now();
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const std::vector<bool> flags = mm::testing::random_flags(rng, 50);
    const double diff =
        std::abs(mm::ap_paper(flags).ap - mm::oracle::oracle_ap(flags));
    worst = std::max(worst, diff);
    out.require(diff <= 1e-12, "difference " + std::to_string(diff) +
                                   " at case " + std::to_string(i));
  }
  const double elapsed = seconds_since(start);
  out.require(elapsed < 1.0, "took " + std::to_string(elapsed) + " s");
  if (out.pass) {
    std::ostringstream s;
    s << "1000 sequences, max |diff| = " << worst << ", " << elapsed << " s";
    out.detail = s.str();
  }
  return out;
}

Outcome hand_traced_fixtures() {
  Outcome out;
  const double tft = mm::ap_paper({true, false, true}).ap;
  const double ttft = mm::ap_paper({true, true, false, true}).ap;
  const double standard = mm::ap_standard({true, true, false, true}, 4).ap;
  out.require(std::abs(tft - 5.0 / 6.0) <= 1e-12,
              "[T,F,T] gave " + std::to_string(tft));
  out.require(std::abs(ttft - 2.75 / 3.0) <= 1e-12,
              "[T,T,F,T] gave " + std::to_string(ttft));
  out.require(standard == 0.6875,
              "standard [T,T,F,T]/4 gave " + std::to_string(standard));
  if (out.pass) {
    std::ostringstream s;
    s.precision(17);
    s << "paper " << tft << ", " << ttft << "; standard " << standard;
    out.detail = s.str();
  }
  return out;
}

Outcome trailing_fp_invariance() {
  Outcome out;
  std::mt19937_64 rng(1005);
  for (int i = 0; i < 200; ++i) {
    std::vector<bool> flags = mm::testing::random_flags(rng, 50);
    const double before = mm::ap_paper(flags).ap;
    flags.insert(flags.end(), 10, false);
    out.require(same_bits(mm::ap_paper(flags).ap, before),
                "AP changed at case " + std::to_string(i));
  }
  if (out.pass) out.detail = "200 sequences + 10 trailing FPs, bit-identical";
  return out;
}

// Three images, two GTs each; detections mix exact hits, partial overlaps,
// misses and tied scores.
struct SyntheticFixture {
  std::vector<mm::Detection> dets;
  std::vector<mm::GroundTruthInstance> gts;
};

SyntheticFixture three_image_fixture() {
  using mm::testing::make_detection;
  using mm::testing::make_gt;
  using mm::testing::rle_from_rows;
  const auto a = rle_from_rows({"1100", "1100", "0000", "0000"});
  const auto b = rle_from_rows({"0000", "0000", "0011", "0011"});
  const auto a_partial = rle_from_rows({"1110", "1100", "0000", "0000"});
  const auto b_weak = rle_from_rows({"0000", "0000", "0001", "1111"});
  const auto miss = rle_from_rows({"0001", "0001", "0000", "0000"});
  SyntheticFixture f;
  for (const char* image : {"i0", "i1", "i2"}) {
    f.gts.push_back(make_gt(image, 0, a));
    f.gts.push_back(make_gt(image, 0, b));
  }
  f.dets = {make_detection("i0", 0, 0.91, a),
            make_detection("i0", 0, 0.40, miss),
            make_detection("i0", 0, 0.33, b_weak),
            make_detection("i1", 0, 0.85, a_partial),
            make_detection("i1", 0, 0.40, a),
            make_detection("i1", 0, 0.12, b),
            make_detection("i2", 0, 0.77, miss),
            make_detection("i2", 0, 0.55, b),
            make_detection("i2", 0, 0.05, a_partial)};
  return f;
}

Outcome score_transform_invariance() {
  Outcome out;
  const SyntheticFixture base = three_image_fixture();
  const std::vector<std::function<double(double)>> transforms{
      [](double x) { return 2.0 * x + 1.0; },
      [](double x) { return x * x * x; }};
  const char* names[] = {"2x+1", "x^3"};
  for (mm::ApMode mode : {mm::ApMode::kPaper, mm::ApMode::kStandard}) {
    mm::EvaluationConfig config;
    config.mode = mode;
    const mm::ApResult reference = mm::evaluate_class(base.dets, base.gts, config);
    out.require(reference.num_tp > 0 && reference.num_tp < base.dets.size(),
                "fixture should mix TPs and FPs");
    for (std::size_t t = 0; t < transforms.size(); ++t) {
      SyntheticFixture moved = base;
      for (auto& det : moved.dets) {
        det.score = transforms[t](det.score);
      }
      const mm::ApResult result =
          mm::evaluate_class(moved.dets, moved.gts, config);
      out.require(same_result(result, reference),
                  std::string("output changed under ") + names[t] + " in " +
                      mm::to_string(mode) + " mode");
    }
  }
  if (out.pass) out.detail = "3-image fixture, 2x+1 and x^3, paper and standard";
  return out;
}

int run_cli(const std::string& args, const fs::path& stdout_path) {
  const std::string command = std::string("\"") + MASKMETRICS_CLI + "\" " +
                              args + " > \"" + stdout_path.string() + "\"";
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome end_to_end_cli() {
  Outcome out;
  const fs::path fixtures = MASKMETRICS_FIXTURES;
  const fs::path dir = fs::temp_directory_path() / "maskmetrics_acceptance";
  fs::create_directories(dir);
  const std::string common = "evaluate --gt \"" +
                             (fixtures / "tft_gt.json").string() +
                             "\" --pred \"" +
                             (fixtures / "tft_pred.json").string() + "\" -o ";
  const int first = run_cli(common + "\"" + (dir / "r1.json").string() + "\"",
                            dir / "stdout1.txt");
  const int second = run_cli(common + "\"" + (dir / "r2.json").string() + "\"",
                             dir / "stdout2.txt");
  out.require(first == 0 && second == 0,
              "exit codes " + std::to_string(first) + ", " +
                  std::to_string(second));
  if (!out.pass) return out;
  const mm::EvaluationReport report = mm::read_report_json(dir / "r1.json");
  out.require(std::abs(report.mean_ap - 5.0 / 6.0) <= 1e-9,
              "mean_ap " + std::to_string(report.mean_ap));
  out.require(mm::read_text_file(dir / "r1.json") ==
                  mm::read_text_file(dir / "r2.json"),
              "report bytes differ between runs");
  const std::string summary = mm::read_text_file(dir / "stdout1.txt");
  out.require(summary.rfind("mAP=", 0) == 0, "summary line: " + summary);
  fs::remove_all(dir);
  if (out.pass) {
    out.detail = "exit 0, deterministic bytes, " +
                 summary.substr(0, summary.find('\n'));
  }
  return out;
}

Outcome degenerate_cases() {
  Outcome out;
  const SyntheticFixture f = three_image_fixture();
  for (mm::ApMode mode : {mm::ApMode::kPaper, mm::ApMode::kStandard}) {
    mm::EvaluationConfig config;
    config.mode = mode;
    const mm::ApResult r = mm::evaluate_class({}, f.gts, config);
    out.require(r.ap == 0.0 && r.degenerate,
                std::string("zero detections not degenerate 0 in ") +
                    mm::to_string(mode) + " mode");
  }
  const mm::ImageSize size(5, 7);
  const mm::RleMask empty = mm::RleMask::empty(size);
  out.require(mm::iou(empty, empty) == 0.0, "RLE empty-vs-empty IoU != 0");
  const mm::BitMask dense_empty(size);
  out.require(mm::oracle::oracle_iou(dense_empty, dense_empty) == 0.0,
              "oracle empty-vs-empty IoU != 0");
  try {
    for (std::size_t n = 0; n <= 50; ++n) {
      const std::vector<bool> none(n, false);
      const mm::ApResult r = mm::ap_paper(none);
      out.require(r.ap == 0.0 && r.degenerate && std::isfinite(r.ap),
                  "rel_total = 0 gave non-zero AP");
      out.require(mm::oracle::oracle_ap(none) == 0.0, "oracle rel_total = 0");
      out.require(mm::ap_standard(none, 3).ap == 0.0, "standard all-FP");
    }
  } catch (const std::exception& e) {
    out.require(false, std::string("rel_total = 0 raised: ") + e.what());
  }
  if (out.pass) out.detail = "zero detections, empty IoU, all-FP sequences";
  return out;
}

Outcome performance_sanity() {
  Outcome out;
  std::mt19937_64 rng(1009);
  const mm::ImageSize size(512, 512);
  std::vector<mm::RleMask> pool;
  std::vector<mm::BitMask> dense;
  for (int i = 0; i < 200; ++i) {
    pool.push_back(mm::testing::random_rle(rng, size, 200));
    dense.push_back(mm::decode_rle(pool.back()));
  }
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  std::vector<std::pair<std::size_t, std::size_t>> pairs(10000);
  for (auto& p : pairs) {
    p = {pick(rng), pick(rng)};
  }

  auto start = Clock::now();
  double rle_sum = 0.0;
  for (const auto& [i, j] : pairs) {
    rle_sum += mm::iou(pool[i], pool[j]);
  }
  const double rle_seconds = seconds_since(start);

  start = Clock::now();
  double dense_sum = 0.0;
  for (const auto& [i, j] : pairs) {
    dense_sum += mm::oracle::oracle_iou(dense[i], dense[j]);
  }
  const double dense_seconds = seconds_since(start);

  out.require(same_bits(rle_sum, dense_sum), "RLE and dense sums differ");
  out.require(rle_seconds < 1.0,
              "RLE took " + std::to_string(rle_seconds) + " s");
  out.require(dense_seconds >= 10.0 * rle_seconds,
              "dense only " + std::to_string(dense_seconds / rle_seconds) +
                  "x slower");
  std::ostringstream s;
  s << "RLE " << rle_seconds << " s, dense " << dense_seconds << " s ("
    << dense_seconds / rle_seconds << "x)";
  if (out.pass) out.detail = s.str();
  return out;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {"1 RLE round trip", rle_round_trip},
      {"2 IoU oracle equivalence", iou_oracle_equivalence},
      {"3 AP oracle equivalence", ap_oracle_equivalence},
      {"4 hand-traced AP fixtures", hand_traced_fixtures},
      {"5 trailing-FP invariance", trailing_fp_invariance},
      {"6 score-transform invariance", score_transform_invariance},
      {"7 end-to-end CLI", end_to_end_cli},
      {"8 degenerate cases", degenerate_cases},
      {"9 performance sanity", performance_sanity},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] %s: %s\n", outcome.pass ? "PASS" : "FAIL", c.name,
                outcome.detail.c_str());
    failures += outcome.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n",
              static_cast<int>(std::size(criteria)) - failures,
              std::size(criteria));
  return failures == 0 ? 0 : 1;
}
