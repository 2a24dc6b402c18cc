#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace maskmetrics {

struct PrPoint {
  double precision = 0.0;
  double recall = 0.0;

  friend bool operator==(const PrPoint&, const PrPoint&) = default;
};

struct ApResult {
  double ap = 0.0;
  std::size_t num_predictions = 0;
  std::size_t num_tp = 0;
  // One point per true positive, in rank order.
  std::vector<PrPoint> pr_points;
  // Set when no prediction was a true positive and the AP was defined as 0
  // instead of dividing by a zero count.
  bool degenerate = false;

  friend bool operator==(const ApResult&, const ApResult&) = default;
};

enum class ApMode {
  // Sum of precision at each TP, divided by the number of TPs.
  kPaper,
  // Sum of precision at each TP, divided by the number of ground-truth
  // instances (all-point, non-interpolated).
  kStandard,
};

const char* to_string(ApMode mode);
// Accepts "paper" or "standard"; throws Error(kInvalidArgument) otherwise.
ApMode parse_ap_mode(const char* text);

// Walks the ranked TP/FP flags; at the n-th prediction (1-based) that is a
// TP the running TP count is incremented and count / n is added to the
// numerator. ap = numerator / count, or 0.0 with `degenerate` set when
// there are no TPs. Recall in the PR points is relative to the final TP
// count.
ApResult ap_paper(const std::vector<bool>& tp_flags);

// Same accumulation, divided by num_gt. Throws Error(kInvalidArgument) when
// num_gt is zero or smaller than the TP count.
ApResult ap_standard(const std::vector<bool>& tp_flags, std::size_t num_gt);

// Precision rel_total / n at every TP; recall is rel_total / num_gt when
// num_gt is given, rel_total / final_rel_total otherwise.
std::vector<PrPoint> pr_curve(const std::vector<bool>& tp_flags,
                              std::optional<std::size_t> num_gt);

// IoU thresholds 0.50, 0.55, ..., 0.95.
std::vector<double> coco_thresholds();

}  // namespace maskmetrics
