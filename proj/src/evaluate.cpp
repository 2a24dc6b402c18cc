#include "maskmetrics/evaluate.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <string>
#include <thread>
#include <unordered_map>

#include "maskmetrics/errors.hpp"

namespace maskmetrics {

std::vector<double> EvaluationConfig::resolved_thresholds() const {
  if (thresholds.empty()) {
    return {iota};
  }
  return thresholds;
}

void EvaluationConfig::validate() const {
  check_iota(iota);
  for (double t : thresholds) {
    check_iota(t);
  }
}

namespace {

using DetectionRefs = std::vector<const Detection*>;
using GroundTruthRefs = std::vector<const GroundTruthInstance*>;

// Core of evaluate_class: one ApResult per threshold.
std::vector<ApResult> evaluate_refs(const DetectionRefs& detections,
                                    const GroundTruthRefs& gts,
                                    const std::vector<double>& thresholds,
                                    ApMode mode, bool cross_class) {
  std::vector<double> scores;
  scores.reserve(detections.size());
  for (const auto* det : detections) {
    scores.push_back(det->score);
  }
  // Global ranking; ties keep input order, which per-image rankings share.
  const std::vector<std::size_t> global_order = sort_detections(scores);

  struct ImageGroup {
    std::vector<std::size_t> det_indices;
    DetectionRefs dets;
    GroundTruthRefs gts;
  };
  std::unordered_map<ImageId, ImageGroup> groups;
  for (std::size_t i = 0; i < detections.size(); ++i) {
    auto& group = groups[detections[i]->image_id];
    group.det_indices.push_back(i);
    group.dets.push_back(detections[i]);
  }
  for (const auto* gt : gts) {
    auto it = groups.find(gt->image_id);
    if (it != groups.end()) {
      it->second.gts.push_back(gt);
    }
  }

  // is_tp[t][i] for detection i (input order) at threshold t.
  std::vector<std::vector<bool>> is_tp(
      thresholds.size(), std::vector<bool>(detections.size(), false));
  for (auto& [image_id, group] : groups) {
    std::vector<double> local_scores;
    local_scores.reserve(group.dets.size());
    for (const auto* det : group.dets) {
      local_scores.push_back(det->score);
    }
    const auto local_order = sort_detections(local_scores);
    const IouTable table = compute_iou_table(group.dets, group.gts, cross_class);
    for (std::size_t t = 0; t < thresholds.size(); ++t) {
      for (const auto& outcome :
           match_from_table(table, local_order, thresholds[t])) {
        is_tp[t][group.det_indices[outcome.detection_index]] = outcome.is_tp;
      }
    }
  }

  std::vector<ApResult> results;
  results.reserve(thresholds.size());
  for (std::size_t t = 0; t < thresholds.size(); ++t) {
    std::vector<bool> flags;
    flags.reserve(detections.size());
    for (std::size_t idx : global_order) {
      flags.push_back(is_tp[t][idx]);
    }
    if (mode == ApMode::kStandard && !gts.empty()) {
      results.push_back(ap_standard(flags, gts.size()));
    } else {
      // No ground truth means no TPs, so both modes degenerate to 0.
      results.push_back(ap_paper(flags));
    }
  }
  return results;
}

template <typename T>
std::vector<const T*> to_refs(std::span<const T> items) {
  std::vector<const T*> refs;
  refs.reserve(items.size());
  for (const auto& item : items) {
    refs.push_back(&item);
  }
  return refs;
}

// Runs task(i) for i in [0, count) on up to max_threads workers. The first
// failing task (by index) is rethrown after all workers finish.
template <typename Task>
void parallel_for(std::size_t count, unsigned max_threads, Task task) {
  unsigned workers = max_threads == 0 ? std::thread::hardware_concurrency()
                                      : max_threads;
  workers = std::max(1u, std::min<unsigned>(
                             workers, static_cast<unsigned>(count)));
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back(worker);
    }
  }
  for (auto& error : errors) {
    if (error) {
      std::rethrow_exception(error);
    }
  }
}

}  // namespace

std::vector<ApResult> evaluate_class_thresholds(
    std::span<const Detection> detections,
    std::span<const GroundTruthInstance> gts, const EvaluationConfig& config) {
  config.validate();
  return evaluate_refs(to_refs(detections), to_refs(gts),
                       config.resolved_thresholds(), config.mode,
                       config.cross_class);
}

ApResult evaluate_class(std::span<const Detection> detections,
                        std::span<const GroundTruthInstance> gts,
                        const EvaluationConfig& config) {
  check_iota(config.iota);
  return evaluate_refs(to_refs(detections), to_refs(gts), {config.iota},
                       config.mode, config.cross_class)
      .front();
}

double mean_ap(std::span<const ClassEvaluation> classes) {
  std::size_t num_thresholds = 0;
  bool any = false;
  for (const auto& cls : classes) {
    if (cls.num_gt == 0) {
      continue;
    }
    if (any && cls.results.size() != num_thresholds) {
      throw Error(ErrorKind::kInvalidArgument,
                  "classes disagree on the number of thresholds");
    }
    num_thresholds = cls.results.size();
    any = true;
  }
  if (!any || num_thresholds == 0) {
    throw Error(ErrorKind::kEmptyInput,
                "mean AP needs at least one class with ground truth");
  }
  double sum_over_thresholds = 0.0;
  for (std::size_t t = 0; t < num_thresholds; ++t) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& cls : classes) {
      if (cls.num_gt > 0) {
        sum += cls.results[t].result.ap;
        ++n;
      }
    }
    sum_over_thresholds += sum / static_cast<double>(n);
  }
  return sum_over_thresholds / static_cast<double>(num_thresholds);
}

EvaluationReport evaluate(const DatasetBundle& bundle,
                          const PredictionSet& predictions,
                          const EvaluationConfig& config,
                          unsigned max_threads) {
  config.validate();
  const auto thresholds = config.resolved_thresholds();

  struct ClassWork {
    std::optional<ClassId> class_id;
    DetectionRefs dets;
    GroundTruthRefs gts;
  };
  std::vector<ClassWork> work;
  if (config.cross_class) {
    work.push_back({std::nullopt,
                    to_refs(std::span(predictions.detections())),
                    to_refs(std::span(bundle.ground_truth()))});
  } else {
    std::map<ClassId, ClassWork> by_class;
    for (const auto& gt : bundle.ground_truth()) {
      auto& cls = by_class[gt.class_id];
      cls.class_id = gt.class_id;
      cls.gts.push_back(&gt);
    }
    for (const auto& det : predictions.detections()) {
      auto& cls = by_class[det.class_id];
      cls.class_id = det.class_id;
      cls.dets.push_back(&det);
    }
    for (auto& [id, cls] : by_class) {
      work.push_back(std::move(cls));
    }
  }

  std::vector<ClassEvaluation> evaluations(work.size());
  parallel_for(work.size(), max_threads, [&](std::size_t i) {
    const auto results = evaluate_refs(work[i].dets, work[i].gts, thresholds,
                                       config.mode, config.cross_class);
    auto& eval = evaluations[i];
    eval.class_id = work[i].class_id;
    eval.num_gt = work[i].gts.size();
    for (std::size_t t = 0; t < thresholds.size(); ++t) {
      eval.results.push_back({thresholds[t], results[t]});
    }
  });

  EvaluationReport report;
  report.config = {config.iota, config.mode, thresholds, config.per_class,
                   config.cross_class};
  for (const auto& eval : evaluations) {
    std::optional<std::string> name;
    if (eval.class_id) {
      auto it = bundle.class_names().find(*eval.class_id);
      if (it != bundle.class_names().end()) {
        name = it->second;
      }
    }
    for (const auto& tr : eval.results) {
      ReportEntry entry{eval.class_id, name, tr.iota, eval.num_gt, tr.result};
      if (!config.per_class) {
        entry.result.pr_points.clear();
      }
      report.entries.push_back(std::move(entry));
    }
  }
  report.mean_ap = mean_ap(evaluations);
  report.counts = {bundle.images().size(), bundle.ground_truth().size(),
                   predictions.detections().size()};
  return report;
}

}  // namespace maskmetrics
