#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "maskmetrics/mask.hpp"

namespace maskmetrics {

using ImageId = std::string;
using ClassId = std::uint32_t;

struct Detection {
  ImageId image_id;
  ClassId class_id = 0;
  double score = 0.0;
  RleMask mask;
};

struct GroundTruthInstance {
  ImageId image_id;
  ClassId class_id = 0;
  RleMask mask;
};

struct MatchOptions {
  // IoU threshold; a detection is a true positive when its best IoU is at
  // least this value. Must lie in (0, 1].
  double iota = 0.5;
  // Ignore class_id when pairing detections with ground truth.
  bool cross_class = false;
};

struct MatchOutcome {
  // Position of the detection in the input sequence. Outcomes themselves
  // are emitted in sorted (descending score) order.
  std::size_t detection_index = 0;
  std::optional<std::size_t> matched_gt_index;
  double iou_value = 0.0;
  bool is_tp = false;

  friend bool operator==(const MatchOutcome&, const MatchOutcome&) = default;
};

// Indices ordered by descending score; equal scores keep input order.
// Throws Error(kNonFiniteScore) on NaN or infinite scores.
std::vector<std::size_t> sort_detections(std::span<const double> scores);
std::vector<std::size_t> sort_detections(std::span<const Detection> detections);

// Dense detection x ground-truth IoU table for one image, row-major by
// detection input index. Entries for class-incompatible pairs are -1.
struct IouTable {
  std::size_t num_detections = 0;
  std::size_t num_gts = 0;
  std::vector<double> values;

  double at(std::size_t det, std::size_t gt) const {
    return values[det * num_gts + gt];
  }
};

IouTable compute_iou_table(std::span<const Detection> detections,
                           std::span<const GroundTruthInstance> gts,
                           bool cross_class);
IouTable compute_iou_table(std::span<const Detection* const> detections,
                           std::span<const GroundTruthInstance* const> gts,
                           bool cross_class);

// Greedy assignment over a precomputed table: detections are visited in
// `order`; each takes the unmatched compatible GT with the highest IoU
// (lowest GT index on ties) and is a TP iff that IoU >= iota.
std::vector<MatchOutcome> match_from_table(const IouTable& table,
                                           std::span<const std::size_t> order,
                                           double iota);

// Greedy one-to-one matching for a single image. Throws
// Error(kMixedImage) when records disagree on image_id and
// Error(kInvalidArgument) when iota is outside (0, 1].
std::vector<MatchOutcome> match_greedy(std::span<const Detection> detections,
                                       std::span<const GroundTruthInstance> gts,
                                       const MatchOptions& options);

std::vector<bool> tp_sequence(std::span<const MatchOutcome> outcomes);

// Throws Error(kInvalidArgument) unless 0 < iota <= 1.
void check_iota(double iota);

}  // namespace maskmetrics
