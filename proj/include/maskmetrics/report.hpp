#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "maskmetrics/ap.hpp"
#include "maskmetrics/matching.hpp"

namespace maskmetrics {

struct ReportConfig {
  double iota = 0.5;
  ApMode mode = ApMode::kPaper;
  // Thresholds actually evaluated (a single entry equal to iota unless a
  // threshold list was requested).
  std::vector<double> thresholds;
  bool per_class = false;
  bool cross_class = false;

  friend bool operator==(const ReportConfig&, const ReportConfig&) = default;
};

struct ReportEntry {
  // Empty in cross-class mode, where all classes are pooled.
  std::optional<ClassId> class_id;
  std::optional<std::string> class_name;
  double iota = 0.5;
  std::size_t num_gt = 0;
  ApResult result;

  friend bool operator==(const ReportEntry&, const ReportEntry&) = default;
};

struct ReportCounts {
  std::size_t images = 0;
  std::size_t ground_truth = 0;
  std::size_t detections = 0;

  friend bool operator==(const ReportCounts&, const ReportCounts&) = default;
};

struct EvaluationReport {
  ReportConfig config;
  // Sorted by class id, then threshold.
  std::vector<ReportEntry> entries;
  double mean_ap = 0.0;
  ReportCounts counts;

  friend bool operator==(const EvaluationReport&,
                         const EvaluationReport&) = default;
};

enum class ReportFormat { kJson, kCsv };

ReportFormat parse_report_format(std::string_view text);

std::string report_to_json(const EvaluationReport& report);
EvaluationReport report_from_json(std::string_view json_text);

// Header line, one row per entry, then a "summary" row carrying mean_ap.
std::string report_to_csv(const EvaluationReport& report);

// Throws Error(kIo) when the file cannot be written.
void write_report(const EvaluationReport& report,
                  const std::filesystem::path& path, ReportFormat format);
EvaluationReport read_report_json(const std::filesystem::path& path);

}  // namespace maskmetrics
