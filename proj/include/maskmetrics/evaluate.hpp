#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "maskmetrics/ap.hpp"
#include "maskmetrics/dataset_io.hpp"
#include "maskmetrics/matching.hpp"
#include "maskmetrics/report.hpp"

namespace maskmetrics {

struct EvaluationConfig {
  double iota = 0.5;
  ApMode mode = ApMode::kPaper;
  // When non-empty, every threshold is evaluated and mAP averages over them;
  // iota is then only echoed in the report.
  std::vector<double> thresholds;
  // Keep per-class PR points in the report.
  bool per_class = false;
  bool cross_class = false;

  std::vector<double> resolved_thresholds() const;
  // Throws Error(kInvalidArgument) when iota or any threshold is outside
  // (0, 1].
  void validate() const;
};

// AP for one class (or the pooled set in cross-class mode) at config.iota.
// Detections are matched per image, then all outcomes are merged into one
// ranking by descending score (ties in input order) before accumulation.
ApResult evaluate_class(std::span<const Detection> detections,
                        std::span<const GroundTruthInstance> gts,
                        const EvaluationConfig& config);

// Same as evaluate_class, once per resolved threshold. IoUs are computed a
// single time and shared across thresholds.
std::vector<ApResult> evaluate_class_thresholds(
    std::span<const Detection> detections,
    std::span<const GroundTruthInstance> gts, const EvaluationConfig& config);

struct ThresholdResult {
  double iota = 0.5;
  ApResult result;
};

struct ClassEvaluation {
  std::optional<ClassId> class_id;
  std::size_t num_gt = 0;
  std::vector<ThresholdResult> results;
};

// Unweighted mean over classes with at least one GT, then over thresholds.
// Every class must carry the same number of thresholds. Throws
// Error(kEmptyInput) when no class has ground truth.
double mean_ap(std::span<const ClassEvaluation> classes);

// Full dataset evaluation. `max_threads` caps the worker count for the
// per-class work (0 = hardware concurrency); results do not depend on it.
EvaluationReport evaluate(const DatasetBundle& bundle,
                          const PredictionSet& predictions,
                          const EvaluationConfig& config,
                          unsigned max_threads = 0);

}  // namespace maskmetrics
