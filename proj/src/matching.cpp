#include "maskmetrics/matching.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "maskmetrics/errors.hpp"

namespace maskmetrics {

void check_iota(double iota) {
  if (!(iota > 0.0 && iota <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument,
                "IoU threshold must be in (0, 1], got " + std::to_string(iota));
  }
}

std::vector<std::size_t> sort_detections(std::span<const double> scores) {
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) {
      throw Error(ErrorKind::kNonFiniteScore,
                  "detection " + std::to_string(i) + " has a non-finite score");
    }
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t lhs, std::size_t rhs) {
                     return scores[lhs] > scores[rhs];
                   });
  return order;
}

std::vector<std::size_t> sort_detections(
    std::span<const Detection> detections) {
  std::vector<double> scores;
  scores.reserve(detections.size());
  for (const auto& det : detections) {
    scores.push_back(det.score);
  }
  return sort_detections(scores);
}

IouTable compute_iou_table(std::span<const Detection* const> detections,
                           std::span<const GroundTruthInstance* const> gts,
                           bool cross_class) {
  IouTable table{detections.size(), gts.size(),
                 std::vector<double>(detections.size() * gts.size(), -1.0)};
  std::vector<std::uint64_t> gt_areas;
  gt_areas.reserve(gts.size());
  for (const auto* gt : gts) {
    gt_areas.push_back(area(gt->mask));
  }
  for (std::size_t d = 0; d < detections.size(); ++d) {
    const std::uint64_t det_area = area(detections[d]->mask);
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (!cross_class && detections[d]->class_id != gts[g]->class_id) {
        continue;
      }
      const std::uint64_t inter =
          intersection_area(detections[d]->mask, gts[g]->mask);
      table.values[d * gts.size() + g] =
          OverlapCounts{inter, det_area + gt_areas[g] - inter}.iou();
    }
  }
  return table;
}

IouTable compute_iou_table(std::span<const Detection> detections,
                           std::span<const GroundTruthInstance> gts,
                           bool cross_class) {
  std::vector<const Detection*> det_refs;
  std::vector<const GroundTruthInstance*> gt_refs;
  for (const auto& det : detections) {
    det_refs.push_back(&det);
  }
  for (const auto& gt : gts) {
    gt_refs.push_back(&gt);
  }
  return compute_iou_table(det_refs, gt_refs, cross_class);
}

std::vector<MatchOutcome> match_from_table(const IouTable& table,
                                           std::span<const std::size_t> order,
                                           double iota) {
  check_iota(iota);
  std::vector<bool> gt_taken(table.num_gts, false);
  std::vector<MatchOutcome> outcomes;
  outcomes.reserve(order.size());
  for (std::size_t det : order) {
    MatchOutcome outcome;
    outcome.detection_index = det;
    std::optional<std::size_t> best;
    double best_iou = 0.0;
    for (std::size_t g = 0; g < table.num_gts; ++g) {
      const double value = table.at(det, g);
      if (gt_taken[g] || value < 0.0) {
        continue;
      }
      // Strict comparison keeps the lowest GT index on ties.
      if (!best || value > best_iou) {
        best = g;
        best_iou = value;
      }
    }
    if (best && best_iou >= iota) {
      gt_taken[*best] = true;
      outcome.matched_gt_index = best;
      outcome.iou_value = best_iou;
      outcome.is_tp = true;
    }
    outcomes.push_back(outcome);
  }
  return outcomes;
}

std::vector<MatchOutcome> match_greedy(std::span<const Detection> detections,
                                       std::span<const GroundTruthInstance> gts,
                                       const MatchOptions& options) {
  check_iota(options.iota);
  const ImageId* image = nullptr;
  auto check_image = [&](const ImageId& id) {
    if (image == nullptr) {
      image = &id;
    } else if (*image != id) {
      throw Error(ErrorKind::kMixedImage,
                  "match_greedy expects one image, got '" + *image +
                      "' and '" + id + "'");
    }
  };
  for (const auto& det : detections) {
    check_image(det.image_id);
  }
  for (const auto& gt : gts) {
    check_image(gt.image_id);
  }
  const auto order = sort_detections(detections);
  const IouTable table =
      compute_iou_table(detections, gts, options.cross_class);
  return match_from_table(table, order, options.iota);
}

std::vector<bool> tp_sequence(std::span<const MatchOutcome> outcomes) {
  std::vector<bool> flags;
  flags.reserve(outcomes.size());
  for (const auto& outcome : outcomes) {
    flags.push_back(outcome.is_tp);
  }
  return flags;
}

}  // namespace maskmetrics
