#include "maskmetrics/ap.hpp"

#include <cstring>
#include <string>

#include "maskmetrics/errors.hpp"

namespace maskmetrics {

const char* to_string(ApMode mode) {
  return mode == ApMode::kPaper ? "paper" : "standard";
}

ApMode parse_ap_mode(const char* text) {
  if (std::strcmp(text, "paper") == 0) {
    return ApMode::kPaper;
  }
  if (std::strcmp(text, "standard") == 0) {
    return ApMode::kStandard;
  }
  throw Error(ErrorKind::kInvalidArgument,
              std::string("unknown AP mode '") + text +
                  "' (expected paper or standard)");
}

namespace {

struct Accumulation {
  double numerator = 0.0;
  std::size_t num_tp = 0;
};

// Fixed left-to-right double accumulation of rel_total / n over the TPs.
Accumulation accumulate(const std::vector<bool>& tp_flags) {
  Accumulation acc;
  for (std::size_t n = 1; n <= tp_flags.size(); ++n) {
    if (tp_flags[n - 1]) {
      ++acc.num_tp;
      acc.numerator +=
          static_cast<double>(acc.num_tp) / static_cast<double>(n);
    }
  }
  return acc;
}

}  // namespace

std::vector<PrPoint> pr_curve(const std::vector<bool>& tp_flags,
                              std::optional<std::size_t> num_gt) {
  std::size_t final_tp = 0;
  for (bool flag : tp_flags) {
    final_tp += flag ? 1 : 0;
  }
  const double recall_denominator =
      static_cast<double>(num_gt ? *num_gt : final_tp);
  std::vector<PrPoint> points;
  points.reserve(final_tp);
  std::size_t rel_total = 0;
  for (std::size_t n = 1; n <= tp_flags.size(); ++n) {
    if (!tp_flags[n - 1]) {
      continue;
    }
    ++rel_total;
    const double tp = static_cast<double>(rel_total);
    points.push_back({tp / static_cast<double>(n),
                      recall_denominator > 0 ? tp / recall_denominator : 0.0});
  }
  return points;
}

ApResult ap_paper(const std::vector<bool>& tp_flags) {
  const Accumulation acc = accumulate(tp_flags);
  ApResult result;
  result.num_predictions = tp_flags.size();
  result.num_tp = acc.num_tp;
  result.pr_points = pr_curve(tp_flags, std::nullopt);
  if (acc.num_tp == 0) {
    result.degenerate = true;
    result.ap = 0.0;
  } else {
    result.ap = acc.numerator / static_cast<double>(acc.num_tp);
  }
  return result;
}

ApResult ap_standard(const std::vector<bool>& tp_flags, std::size_t num_gt) {
  if (num_gt == 0) {
    throw Error(ErrorKind::kInvalidArgument,
                "standard AP needs at least one ground-truth instance");
  }
  const Accumulation acc = accumulate(tp_flags);
  if (acc.num_tp > num_gt) {
    throw Error(ErrorKind::kInvalidArgument,
                std::to_string(acc.num_tp) + " true positives exceed " +
                    std::to_string(num_gt) + " ground-truth instances");
  }
  ApResult result;
  result.num_predictions = tp_flags.size();
  result.num_tp = acc.num_tp;
  result.pr_points = pr_curve(tp_flags, num_gt);
  result.degenerate = acc.num_tp == 0;
  result.ap = acc.numerator / static_cast<double>(num_gt);
  return result;
}

std::vector<double> coco_thresholds() {
  std::vector<double> thresholds;
  for (int step = 10; step <= 19; ++step) {
    thresholds.push_back(step / 20.0);
  }
  return thresholds;
}

}  // namespace maskmetrics
