#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <charconv>
#include <optional>
#include <ostream>
#include <string_view>

#include "CLI11.hpp"
#include "maskmetrics/dataset_io.hpp"
#include "maskmetrics/errors.hpp"
#include "maskmetrics/evaluate.hpp"
#include "maskmetrics/report.hpp"

namespace maskmetrics::cli {

namespace {

struct EvaluateOptions {
  std::string gt_path;
  std::string pred_path;
  double iota = 0.5;
  std::string mode = "paper";
  bool coco_thresholds = false;
  bool per_class = false;
  std::optional<double> min_score;
  bool cross_class = false;
  std::string output;
  std::string format = "json";
  bool lenient = false;
};

struct IouOptions {
  std::string mask_a;
  std::string mask_b;
};

struct ValidateOptions {
  std::string path;
  std::string kind = "gt";
  std::string gt_path;
};

std::string format_double(double value) {
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, end);
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kIo:
      return kIoFailure;
    case ErrorKind::kInvalidArgument:
      return kUsage;
    default:
      return kInvalidInput;
  }
}

void print_error(std::ostream& err, const Error& e) {
  if (const auto* dataset = dynamic_cast<const DatasetError*>(&e)) {
    for (const auto& diag : dataset->diagnostics()) {
      err << "error: " << diag.to_string() << "\n";
    }
    return;
  }
  err << "error: " << to_string(e.kind()) << ": " << e.what() << "\n";
}

std::string summary_line(const EvaluationReport& report) {
  std::string iota;
  if (report.config.thresholds.size() == 1) {
    iota = format_double(report.config.thresholds.front());
  } else {
    for (double t : report.config.thresholds) {
      iota += (iota.empty() ? "" : ",") + format_double(t);
    }
  }
  std::size_t classes = 0;
  for (std::size_t i = 0; i < report.entries.size(); ++i) {
    const auto& entry = report.entries[i];
    const bool first_of_class =
        i == 0 || report.entries[i - 1].class_id != entry.class_id;
    if (first_of_class && entry.num_gt > 0) {
      ++classes;
    }
  }
  return "mAP=" + format_double(report.mean_ap) + " mode=" +
         to_string(report.config.mode) + " iota=" + iota +
         " classes=" + std::to_string(classes);
}

int cmd_evaluate(const EvaluateOptions& opts, std::ostream& out) {
  EvaluationConfig config;
  config.iota = opts.iota;
  config.mode = parse_ap_mode(opts.mode.c_str());
  if (opts.coco_thresholds) {
    config.thresholds = coco_thresholds();
  }
  config.per_class = opts.per_class;
  config.cross_class = opts.cross_class;
  config.validate();
  if (opts.min_score && !std::isfinite(*opts.min_score)) {
    throw Error(ErrorKind::kInvalidArgument, "--min-score must be finite");
  }
  const ReportFormat format = parse_report_format(opts.format);

  const LoadOptions load{.lenient = opts.lenient};
  const DatasetBundle bundle = load_ground_truth(opts.gt_path, load);
  PredictionSet predictions = load_predictions(opts.pred_path, bundle, load);
  if (opts.min_score) {
    std::vector<Detection> kept;
    for (const auto& det : predictions.detections()) {
      if (det.score >= *opts.min_score) {
        kept.push_back(det);
      }
    }
    predictions = PredictionSet(bundle, std::move(kept));
  }

  const EvaluationReport report =
      evaluate(bundle, predictions, config, threads_from_env());
  write_report(report, opts.output, format);
  out << summary_line(report) << "\n";
  return kOk;
}

int cmd_iou(const IouOptions& opts, std::ostream& out) {
  const RleMask a = load_mask(opts.mask_a);
  const RleMask b = load_mask(opts.mask_b);
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.6f", iou(a, b));
  out << buffer << "\n";
  return kOk;
}

int cmd_validate(const ValidateOptions& opts, std::ostream& out,
                 std::ostream& err) {
  std::vector<Diagnostic> diagnostics;
  if (opts.kind == "gt") {
    diagnostics = check_ground_truth_file(opts.path);
  } else {
    std::optional<DatasetBundle> bundle;
    if (!opts.gt_path.empty()) {
      bundle.emplace(load_ground_truth(opts.gt_path));
    }
    diagnostics =
        check_predictions_file(opts.path, bundle ? &*bundle : nullptr);
  }
  if (diagnostics.empty()) {
    out << "OK\n";
    return kOk;
  }
  for (const auto& diag : diagnostics) {
    err << opts.path << ": " << diag.to_string() << "\n";
  }
  return kInvalidInput;
}

}  // namespace

unsigned threads_from_env() {
  const char* value = std::getenv("MASKMETRICS_THREADS");
  if (value == nullptr) {
    return 0;
  }
  unsigned threads = 0;
  const std::string_view text(value);
  auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), threads);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    return 0;
  }
  return threads;
}

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Instance-segmentation mask AP evaluation", "maskmetrics"};
  app.require_subcommand(1);

  EvaluateOptions eval_opts;
  auto* evaluate_cmd =
      app.add_subcommand("evaluate", "Evaluate predictions against ground truth");
  evaluate_cmd->add_option("--gt", eval_opts.gt_path, "Ground-truth JSON file")
      ->required();
  evaluate_cmd->add_option("--pred", eval_opts.pred_path, "Prediction JSON file")
      ->required();
  evaluate_cmd->add_option("--iota", eval_opts.iota,
                           "IoU threshold for a true positive, in (0, 1]")
      ->capture_default_str();
  evaluate_cmd->add_option("--mode", eval_opts.mode,
                           "AP denominator: paper (TP count) or standard (GT count)")
      ->check(CLI::IsMember({"paper", "standard"}))
      ->capture_default_str();
  evaluate_cmd->add_flag("--coco-thresholds", eval_opts.coco_thresholds,
                         "Average over IoU thresholds 0.50:0.05:0.95");
  evaluate_cmd->add_flag("--per-class", eval_opts.per_class,
                         "Include per-class PR points in the report");
  evaluate_cmd->add_option("--min-score", eval_opts.min_score,
                           "Drop detections scoring below this value");
  evaluate_cmd->add_flag("--cross-class", eval_opts.cross_class,
                         "Match detections to ground truth of any class");
  evaluate_cmd->add_option("-o,--output", eval_opts.output, "Report path")
      ->required();
  evaluate_cmd->add_option("--format", eval_opts.format, "Report format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  evaluate_cmd->add_flag("--lenient", eval_opts.lenient,
                         "Report every validation error before aborting");

  IouOptions iou_opts;
  auto* iou_cmd = app.add_subcommand("iou", "Print the IoU of two mask files");
  iou_cmd->add_option("mask_a", iou_opts.mask_a, "First mask JSON")->required();
  iou_cmd->add_option("mask_b", iou_opts.mask_b, "Second mask JSON")->required();

  ValidateOptions validate_opts;
  auto* validate_cmd =
      app.add_subcommand("validate", "Check a ground-truth or prediction file");
  validate_cmd->add_option("path", validate_opts.path, "File to check")
      ->required();
  validate_cmd->add_option("--kind", validate_opts.kind, "File kind")
      ->check(CLI::IsMember({"gt", "pred"}))
      ->capture_default_str();
  validate_cmd->add_option(
      "--gt", validate_opts.gt_path,
      "Ground truth to check prediction image ids and mask sizes against");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& arg : args) {
    argv.push_back(arg.c_str());
  }
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*evaluate_cmd) {
      return cmd_evaluate(eval_opts, out);
    }
    if (*iou_cmd) {
      return cmd_iou(iou_opts, out);
    }
    return cmd_validate(validate_opts, out, err);
  } catch (const Error& e) {
    print_error(err, e);
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidInput;
  }
}

}  // namespace maskmetrics::cli
