#pragma once

// Ground-truth and prediction file ingestion.
//
// Ground truth:
//   {"images":      [{"id": <str|uint>, "height": <uint>, "width": <uint>}],
//    "annotations": [{"image_id": <str|uint>, "class_id": <uint>, "rle": [<uint>...]}],
//    "classes":     {"<class_id>": "<name>", ...}}            (optional)
// Predictions:
//   {"detections":  [{"image_id", "class_id", "score": <number>, "rle": [...]}]}
// Single mask (debug utility):
//   {"height": <uint>, "width": <uint>, "rle": [...]}
//
// RLE arrays use the canonical row-major run form of RleMask. Integer image
// ids are normalized to their decimal string, so 7 and "7" name the same
// image.

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "maskmetrics/errors.hpp"
#include "maskmetrics/mask.hpp"
#include "maskmetrics/matching.hpp"

namespace maskmetrics {

struct ImageRecord {
  ImageId id;
  ImageSize size;
};

class DatasetBundle {
 public:
  // Validates that image ids are unique, every annotation names a declared
  // image, its mask matches the image size and is non-empty. Throws
  // DatasetError with the first violation, or with all of them if
  // `lenient` is set.
  DatasetBundle(std::vector<ImageRecord> images,
                std::vector<GroundTruthInstance> ground_truth,
                std::map<ClassId, std::string> class_names = {},
                bool lenient = false);

  const std::vector<ImageRecord>& images() const { return images_; }
  const std::vector<GroundTruthInstance>& ground_truth() const {
    return ground_truth_;
  }
  const std::map<ClassId, std::string>& class_names() const {
    return class_names_;
  }

  const ImageRecord* find_image(const ImageId& id) const;

 private:
  std::vector<ImageRecord> images_;
  std::vector<GroundTruthInstance> ground_truth_;
  std::map<ClassId, std::string> class_names_;
  std::unordered_map<ImageId, std::size_t> image_index_;
};

class PredictionSet {
 public:
  // Validates every detection against `bundle`: known image, matching mask
  // size, finite score.
  PredictionSet(const DatasetBundle& bundle, std::vector<Detection> detections,
                bool lenient = false);

  const std::vector<Detection>& detections() const { return detections_; }

 private:
  std::vector<Detection> detections_;
};

struct LoadOptions {
  // Collect every violation before failing instead of stopping at the first.
  bool lenient = false;
};

DatasetBundle parse_ground_truth(std::string_view json_text,
                                 const LoadOptions& options = {});
DatasetBundle load_ground_truth(const std::filesystem::path& path,
                                const LoadOptions& options = {});

PredictionSet parse_predictions(std::string_view json_text,
                                const DatasetBundle& bundle,
                                const LoadOptions& options = {});
PredictionSet load_predictions(const std::filesystem::path& path,
                               const DatasetBundle& bundle,
                               const LoadOptions& options = {});

// Checks a file without building the in-memory sets and returns every
// diagnostic (empty when the file is valid). For prediction files the
// image and size checks need `bundle`; without it only the schema, scores
// and RLE run rules are checked. Throws Error(kIo) if the file cannot be
// read.
std::vector<Diagnostic> check_ground_truth_file(
    const std::filesystem::path& path);
std::vector<Diagnostic> check_predictions_file(
    const std::filesystem::path& path, const DatasetBundle* bundle);

RleMask parse_mask(std::string_view json_text);
RleMask load_mask(const std::filesystem::path& path);

// Reads a whole file; throws Error(kIo) naming the path on failure.
std::string read_text_file(const std::filesystem::path& path);

}  // namespace maskmetrics
