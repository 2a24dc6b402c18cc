#include "maskmetrics/report.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "maskmetrics/dataset_io.hpp"
#include "maskmetrics/errors.hpp"
#include "test_support.hpp"

namespace maskmetrics {
namespace {

EvaluationReport random_report(std::mt19937_64& rng, std::size_t classes,
                               std::size_t thresholds) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  EvaluationReport report;
  report.config.iota = 0.5;
  report.config.mode = unit(rng) < 0.5 ? ApMode::kPaper : ApMode::kStandard;
  for (std::size_t t = 0; t < thresholds; ++t) {
    report.config.thresholds.push_back(0.5 + 0.05 * static_cast<double>(t));
  }
  report.config.per_class = true;
  report.config.cross_class = classes == 0;
  const std::size_t entries_classes = classes == 0 ? 1 : classes;
  for (std::size_t c = 0; c < entries_classes; ++c) {
    for (double iota : report.config.thresholds) {
      ReportEntry entry;
      if (classes != 0) {
        entry.class_id = static_cast<ClassId>(c * 3);
        if (c % 2 == 0) {
          entry.class_name = "class, \"" + std::to_string(c) + "\"";
        }
      }
      entry.iota = iota;
      entry.num_gt = c;
      entry.result = ap_paper(testing::random_flags(rng, 20));
      report.entries.push_back(entry);
    }
  }
  report.mean_ap = unit(rng);
  report.counts = {3, 7, 11};
  return report;
}

std::size_t count_lines(const std::string& text) {
  std::size_t lines = 0;
  for (char c : text) {
    lines += c == '\n' ? 1 : 0;
  }
  return lines;
}

TEST(ReportJsonTest, RoundTripIsLossless) {
  std::mt19937_64 rng(51);
  for (int i = 0; i < 50; ++i) {
    const EvaluationReport report =
        random_report(rng, static_cast<std::size_t>(i % 4), 1 + i % 3);
    const std::string text = report_to_json(report);
    const EvaluationReport back = report_from_json(text);
    ASSERT_EQ(back, report);
    ASSERT_EQ(report_to_json(back), text);
  }
}

TEST(ReportJsonTest, DegenerateFlagSurvives) {
  EvaluationReport report;
  report.config.thresholds = {0.5};
  report.entries.push_back({1, std::nullopt, 0.5, 2, ap_paper({false})});
  ASSERT_TRUE(report.entries[0].result.degenerate);
  EXPECT_TRUE(
      report_from_json(report_to_json(report)).entries[0].result.degenerate);
}

TEST(ReportJsonTest, RejectsMalformed) {
  EXPECT_THROW(report_from_json("{}"), Error);
  EXPECT_THROW(report_from_json("nope"), Error);
}

TEST(ReportCsvTest, RowCounts) {
  std::mt19937_64 rng(52);
  // Header + one class row + summary.
  EXPECT_EQ(count_lines(report_to_csv(random_report(rng, 1, 1))), 1u + 2u);
  // Header + 3 classes x 2 thresholds + summary.
  EXPECT_EQ(count_lines(report_to_csv(random_report(rng, 3, 2))), 1u + 7u);
}

TEST(ReportCsvTest, Content) {
  EvaluationReport report;
  report.config.thresholds = {0.5};
  report.entries.push_back({2, "cat,dog", 0.5, 2, ap_paper({true, false, true})});
  report.mean_ap = report.entries[0].result.ap;
  report.counts = {1, 2, 3};
  const std::string csv = report_to_csv(report);
  std::istringstream lines(csv);
  std::string header, row, summary;
  std::getline(lines, header);
  std::getline(lines, row);
  std::getline(lines, summary);
  EXPECT_EQ(header,
            "class_id,class_name,iota,mode,num_gt,num_predictions,num_tp,ap,"
            "degenerate");
  EXPECT_EQ(row, "2,\"cat,dog\",0.5,paper,2,3,2,0.8333333333333333,false");
  EXPECT_EQ(summary, "summary,,,paper,2,3,,0.8333333333333333,false");
}

TEST(WriteReportTest, WritesAndReadsBack) {
  std::mt19937_64 rng(53);
  const EvaluationReport report = random_report(rng, 2, 2);
  const auto dir = std::filesystem::temp_directory_path();
  const auto json_path = dir / "maskmetrics_report_test.json";
  const auto csv_path = dir / "maskmetrics_report_test.csv";
  write_report(report, json_path, ReportFormat::kJson);
  write_report(report, csv_path, ReportFormat::kCsv);
  EXPECT_EQ(read_report_json(json_path), report);
  EXPECT_EQ(read_text_file(csv_path), report_to_csv(report));
  std::filesystem::remove(json_path);
  std::filesystem::remove(csv_path);
}

TEST(WriteReportTest, UnwritablePathIsIoError) {
  try {
    write_report({}, "/nonexistent-dir/report.json", ReportFormat::kJson);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIo);
  }
}

TEST(ReportFormatTest, Parse) {
  EXPECT_EQ(parse_report_format("json"), ReportFormat::kJson);
  EXPECT_EQ(parse_report_format("csv"), ReportFormat::kCsv);
  EXPECT_THROW(parse_report_format("xml"), Error);
}

}  // namespace
}  // namespace maskmetrics
