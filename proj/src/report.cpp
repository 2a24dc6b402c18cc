#include "maskmetrics/report.hpp"

#include <charconv>
#include <fstream>

#include "json.hpp"
#include "maskmetrics/dataset_io.hpp"
#include "maskmetrics/errors.hpp"

namespace maskmetrics {

using ordered_json = nlohmann::ordered_json;

ReportFormat parse_report_format(std::string_view text) {
  if (text == "json") {
    return ReportFormat::kJson;
  }
  if (text == "csv") {
    return ReportFormat::kCsv;
  }
  throw Error(ErrorKind::kInvalidArgument,
              "unknown report format '" + std::string(text) +
                  "' (expected json or csv)");
}

namespace {

std::string format_double(double value) {
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, end);
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n\r") == std::string::npos) {
    return text;
  }
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') {
      out += '"';
    }
    out += c;
  }
  return out + "\"";
}

ordered_json entry_to_json(const ReportEntry& entry) {
  ordered_json out;
  out["class_id"] = entry.class_id ? ordered_json(*entry.class_id)
                                   : ordered_json(nullptr);
  if (entry.class_name) {
    out["class_name"] = *entry.class_name;
  }
  out["iota"] = entry.iota;
  out["num_gt"] = entry.num_gt;
  out["ap"] = entry.result.ap;
  out["num_predictions"] = entry.result.num_predictions;
  out["num_tp"] = entry.result.num_tp;
  out["degenerate"] = entry.result.degenerate;
  ordered_json points = ordered_json::array();
  for (const auto& p : entry.result.pr_points) {
    points.push_back({p.precision, p.recall});
  }
  out["pr_points"] = std::move(points);
  return out;
}

ReportEntry entry_from_json(const ordered_json& in) {
  ReportEntry entry;
  if (!in.at("class_id").is_null()) {
    entry.class_id = in.at("class_id").get<ClassId>();
  }
  if (auto it = in.find("class_name"); it != in.end()) {
    entry.class_name = it->get<std::string>();
  }
  entry.iota = in.at("iota").get<double>();
  entry.num_gt = in.at("num_gt").get<std::size_t>();
  entry.result.ap = in.at("ap").get<double>();
  entry.result.num_predictions = in.at("num_predictions").get<std::size_t>();
  entry.result.num_tp = in.at("num_tp").get<std::size_t>();
  entry.result.degenerate = in.at("degenerate").get<bool>();
  for (const auto& p : in.at("pr_points")) {
    entry.result.pr_points.push_back(
        {p.at(0).get<double>(), p.at(1).get<double>()});
  }
  return entry;
}

}  // namespace

std::string report_to_json(const EvaluationReport& report) {
  ordered_json out;
  ordered_json config;
  config["iota"] = report.config.iota;
  config["mode"] = to_string(report.config.mode);
  config["thresholds"] = report.config.thresholds;
  config["per_class"] = report.config.per_class;
  config["cross_class"] = report.config.cross_class;
  out["config"] = std::move(config);
  out["counts"] = {{"images", report.counts.images},
                   {"ground_truth", report.counts.ground_truth},
                   {"detections", report.counts.detections}};
  ordered_json entries = ordered_json::array();
  for (const auto& entry : report.entries) {
    entries.push_back(entry_to_json(entry));
  }
  out["entries"] = std::move(entries);
  out["mean_ap"] = report.mean_ap;
  return out.dump(2) + "\n";
}

EvaluationReport report_from_json(std::string_view json_text) {
  try {
    const auto in = ordered_json::parse(json_text);
    EvaluationReport report;
    const auto& config = in.at("config");
    report.config.iota = config.at("iota").get<double>();
    report.config.mode =
        parse_ap_mode(config.at("mode").get<std::string>().c_str());
    report.config.thresholds =
        config.at("thresholds").get<std::vector<double>>();
    report.config.per_class = config.at("per_class").get<bool>();
    report.config.cross_class = config.at("cross_class").get<bool>();
    const auto& counts = in.at("counts");
    report.counts.images = counts.at("images").get<std::size_t>();
    report.counts.ground_truth = counts.at("ground_truth").get<std::size_t>();
    report.counts.detections = counts.at("detections").get<std::size_t>();
    for (const auto& entry : in.at("entries")) {
      report.entries.push_back(entry_from_json(entry));
    }
    report.mean_ap = in.at("mean_ap").get<double>();
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("invalid report: ") + e.what());
  }
}

std::string report_to_csv(const EvaluationReport& report) {
  const char* mode = to_string(report.config.mode);
  std::string out =
      "class_id,class_name,iota,mode,num_gt,num_predictions,num_tp,ap,"
      "degenerate\n";
  bool any_degenerate = false;
  for (const auto& entry : report.entries) {
    any_degenerate = any_degenerate || entry.result.degenerate;
    out += entry.class_id ? std::to_string(*entry.class_id) : "all";
    out += ',' + csv_field(entry.class_name.value_or(""));
    out += ',' + format_double(entry.iota);
    out += ',' + std::string(mode);
    out += ',' + std::to_string(entry.num_gt);
    out += ',' + std::to_string(entry.result.num_predictions);
    out += ',' + std::to_string(entry.result.num_tp);
    out += ',' + format_double(entry.result.ap);
    out += entry.result.degenerate ? ",true\n" : ",false\n";
  }
  out += "summary,,,";
  out += mode;
  out += ',' + std::to_string(report.counts.ground_truth);
  out += ',' + std::to_string(report.counts.detections);
  out += ",," + format_double(report.mean_ap);
  out += any_degenerate ? ",true\n" : ",false\n";
  return out;
}

void write_report(const EvaluationReport& report,
                  const std::filesystem::path& path, ReportFormat format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorKind::kIo, "cannot write '" + path.string() + "'");
  }
  out << (format == ReportFormat::kJson ? report_to_json(report)
                                        : report_to_csv(report));
  out.flush();
  if (!out) {
    throw Error(ErrorKind::kIo, "error writing '" + path.string() + "'");
  }
}

EvaluationReport read_report_json(const std::filesystem::path& path) {
  return report_from_json(read_text_file(path));
}

}  // namespace maskmetrics
