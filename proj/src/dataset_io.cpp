#include "maskmetrics/dataset_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_set>
#include <utility>

#include "json.hpp"

namespace maskmetrics {

using nlohmann::json;

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::kIo, "cannot open '" + path.string() + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) {
    throw Error(ErrorKind::kIo, "error reading '" + path.string() + "'");
  }
  return buffer.str();
}

namespace {

// Collects diagnostics; in strict mode the first one aborts immediately.
class Diagnostics {
 public:
  explicit Diagnostics(bool lenient) : lenient_(lenient) {}

  void add(ErrorKind kind, std::optional<std::size_t> record, std::string field,
           std::string message) {
    items_.push_back({kind, record, std::move(field), std::move(message)});
    if (!lenient_) {
      throw DatasetError(std::move(items_));
    }
  }

  void throw_if_any() {
    if (!items_.empty()) {
      throw DatasetError(std::move(items_));
    }
  }

  std::vector<Diagnostic> take() { return std::move(items_); }

 private:
  bool lenient_;
  std::vector<Diagnostic> items_;
};

std::string field_path(const char* array, std::size_t index,
                       const char* field) {
  return std::string(array) + "[" + std::to_string(index) + "]." + field;
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw DatasetError(
        {{ErrorKind::kParse, std::nullopt, "", std::string(e.what())}});
  }
}

// Image ids may be strings or non-negative integers.
std::optional<ImageId> read_image_id(const json& value) {
  if (value.is_string()) {
    return value.get<std::string>();
  }
  if (value.is_number_unsigned()) {
    return std::to_string(value.get<std::uint64_t>());
  }
  return std::nullopt;
}

std::optional<std::uint64_t> read_uint(const json& value, std::uint64_t max) {
  if (!value.is_number_unsigned()) {
    return std::nullopt;
  }
  const auto v = value.get<std::uint64_t>();
  if (v > max) {
    return std::nullopt;
  }
  return v;
}

// Reads a run array; checks element types and the interior-zero rule but
// not the total, which needs the image size.
std::optional<std::vector<std::uint64_t>> read_runs(
    const json& value, std::optional<std::size_t> record,
    const std::string& field, Diagnostics& diags) {
  if (!value.is_array() || value.empty()) {
    diags.add(ErrorKind::kSchema, record, field,
              "expected a non-empty array of non-negative integers");
    return std::nullopt;
  }
  std::vector<std::uint64_t> runs;
  runs.reserve(value.size());
  for (std::size_t i = 0; i < value.size(); ++i) {
    if (!value[i].is_number_unsigned()) {
      diags.add(ErrorKind::kSchema, record, field,
                "run " + std::to_string(i) + " is not a non-negative integer");
      return std::nullopt;
    }
    runs.push_back(value[i].get<std::uint64_t>());
    if (i > 0 && runs.back() == 0) {
      diags.add(ErrorKind::kInvalidEncoding, record, field,
                "run " + std::to_string(i) +
                    " is zero; only the first run may be empty");
      return std::nullopt;
    }
  }
  return runs;
}

std::optional<RleMask> make_mask(ImageSize size, std::vector<std::uint64_t> runs,
                                 std::optional<std::size_t> record,
                                 const std::string& field, Diagnostics& diags) {
  try {
    return RleMask(size, std::move(runs));
  } catch (const Error& e) {
    diags.add(e.kind(), record, field, e.what());
    return std::nullopt;
  }
}

const json* member(const json& object, const char* key) {
  auto it = object.find(key);
  return it == object.end() ? nullptr : &*it;
}

struct ParsedGroundTruth {
  std::vector<ImageRecord> images;
  std::vector<GroundTruthInstance> annotations;
  std::map<ClassId, std::string> class_names;
};

ParsedGroundTruth parse_ground_truth_json(const json& root,
                                          Diagnostics& diags) {
  ParsedGroundTruth out;
  if (!root.is_object()) {
    diags.add(ErrorKind::kSchema, std::nullopt, "",
              "ground-truth file must be a JSON object");
    return out;
  }
  const json* images = member(root, "images");
  const json* annotations = member(root, "annotations");
  if (images == nullptr && annotations == nullptr &&
      member(root, "detections") != nullptr) {
    diags.add(ErrorKind::kSchema, std::nullopt, "",
              "schema mismatch: expected a ground-truth file with \"images\" "
              "and \"annotations\", found a prediction file (\"detections\")");
    return out;
  }
  if (images == nullptr || !images->is_array()) {
    diags.add(ErrorKind::kSchema, std::nullopt, "images",
              "missing or not an array");
    return out;
  }
  if (annotations == nullptr || !annotations->is_array()) {
    diags.add(ErrorKind::kSchema, std::nullopt, "annotations",
              "missing or not an array");
    return out;
  }

  std::unordered_map<ImageId, ImageSize> sizes;
  for (std::size_t i = 0; i < images->size(); ++i) {
    const json& rec = (*images)[i];
    if (!rec.is_object()) {
      diags.add(ErrorKind::kSchema, i, field_path("images", i, ""),
                "expected an object");
      continue;
    }
    const json* id = member(rec, "id");
    const auto image_id = id ? read_image_id(*id) : std::nullopt;
    if (!image_id) {
      diags.add(ErrorKind::kSchema, i, field_path("images", i, "id"),
                "missing or not a string / non-negative integer");
      continue;
    }
    const json* h = member(rec, "height");
    const json* w = member(rec, "width");
    const auto height =
        h ? read_uint(*h, std::numeric_limits<std::uint32_t>::max())
          : std::nullopt;
    const auto width =
        w ? read_uint(*w, std::numeric_limits<std::uint32_t>::max())
          : std::nullopt;
    if (!height || !width) {
      diags.add(ErrorKind::kSchema, i,
                field_path("images", i, height ? "width" : "height"),
                "missing or not a 32-bit non-negative integer");
      continue;
    }
    try {
      ImageSize size(static_cast<std::uint32_t>(*height),
                     static_cast<std::uint32_t>(*width));
      if (!sizes.emplace(*image_id, size).second) {
        diags.add(ErrorKind::kSchema, i, field_path("images", i, "id"),
                  "duplicate image id '" + *image_id + "'");
        continue;
      }
      out.images.push_back({*image_id, size});
    } catch (const Error& e) {
      diags.add(e.kind(), i, field_path("images", i, "height"), e.what());
    }
  }

  for (std::size_t i = 0; i < annotations->size(); ++i) {
    const json& rec = (*annotations)[i];
    if (!rec.is_object()) {
      diags.add(ErrorKind::kSchema, i, field_path("annotations", i, ""),
                "expected an object");
      continue;
    }
    const json* id = member(rec, "image_id");
    const auto image_id = id ? read_image_id(*id) : std::nullopt;
    if (!image_id) {
      diags.add(ErrorKind::kSchema, i, field_path("annotations", i, "image_id"),
                "missing or not a string / non-negative integer");
      continue;
    }
    const json* cls = member(rec, "class_id");
    const auto class_id =
        cls ? read_uint(*cls, std::numeric_limits<ClassId>::max())
            : std::nullopt;
    if (!class_id) {
      diags.add(ErrorKind::kSchema, i, field_path("annotations", i, "class_id"),
                "missing or not a 32-bit non-negative integer");
      continue;
    }
    const json* rle = member(rec, "rle");
    const std::string rle_field = field_path("annotations", i, "rle");
    if (rle == nullptr) {
      diags.add(ErrorKind::kSchema, i, rle_field, "missing");
      continue;
    }
    auto runs = read_runs(*rle, i, rle_field, diags);
    if (!runs) {
      continue;
    }
    auto size = sizes.find(*image_id);
    if (size == sizes.end()) {
      diags.add(ErrorKind::kUnknownImage, i,
                field_path("annotations", i, "image_id"),
                "unknown image id '" + *image_id + "'");
      continue;
    }
    auto mask = make_mask(size->second, std::move(*runs), i, rle_field, diags);
    if (!mask) {
      continue;
    }
    if (area(*mask) == 0) {
      diags.add(ErrorKind::kEmptyMask, i, rle_field,
                "ground-truth mask has no foreground pixels");
      continue;
    }
    out.annotations.push_back(
        {*image_id, static_cast<ClassId>(*class_id), std::move(*mask)});
  }

  if (const json* classes = member(root, "classes")) {
    if (!classes->is_object()) {
      diags.add(ErrorKind::kSchema, std::nullopt, "classes",
                "expected an object mapping class ids to names");
    } else {
      for (const auto& [key, name] : classes->items()) {
        std::size_t consumed = 0;
        unsigned long long id = 0;
        try {
          id = std::stoull(key, &consumed);
        } catch (const std::exception&) {
          consumed = 0;
        }
        if (consumed == 0 || consumed != key.size() ||
            id > std::numeric_limits<ClassId>::max() || !name.is_string()) {
          diags.add(ErrorKind::kSchema, std::nullopt, "classes." + key,
                    "keys must be class ids and values strings");
          continue;
        }
        out.class_names[static_cast<ClassId>(id)] = name.get<std::string>();
      }
    }
  }
  return out;
}

// Non-finite scores cannot be written as JSON numbers; accept the usual
// textual spellings so they are reported as score errors, not schema errors.
std::optional<double> read_score(const json& value) {
  if (value.is_number()) {
    return value.get<double>();
  }
  if (value.is_string()) {
    const auto& text = value.get_ref<const std::string&>();
    if (text == "NaN" || text == "nan") {
      return std::numeric_limits<double>::quiet_NaN();
    }
    if (text == "Infinity" || text == "inf") {
      return std::numeric_limits<double>::infinity();
    }
    if (text == "-Infinity" || text == "-inf") {
      return -std::numeric_limits<double>::infinity();
    }
  }
  return std::nullopt;
}

std::vector<Detection> parse_predictions_json(const json& root,
                                              const DatasetBundle* bundle,
                                              Diagnostics& diags) {
  std::vector<Detection> out;
  if (!root.is_object()) {
    diags.add(ErrorKind::kSchema, std::nullopt, "",
              "prediction file must be a JSON object");
    return out;
  }
  const json* detections = member(root, "detections");
  if (detections == nullptr &&
      (member(root, "images") != nullptr ||
       member(root, "annotations") != nullptr)) {
    diags.add(ErrorKind::kSchema, std::nullopt, "",
              "schema mismatch: expected a prediction file with "
              "\"detections\", found a ground-truth file (\"images\" / "
              "\"annotations\")");
    return out;
  }
  if (detections == nullptr || !detections->is_array()) {
    diags.add(ErrorKind::kSchema, std::nullopt, "detections",
              "missing or not an array");
    return out;
  }
  for (std::size_t i = 0; i < detections->size(); ++i) {
    const json& rec = (*detections)[i];
    if (!rec.is_object()) {
      diags.add(ErrorKind::kSchema, i, field_path("detections", i, ""),
                "expected an object");
      continue;
    }
    const json* id = member(rec, "image_id");
    const auto image_id = id ? read_image_id(*id) : std::nullopt;
    if (!image_id) {
      diags.add(ErrorKind::kSchema, i, field_path("detections", i, "image_id"),
                "missing or not a string / non-negative integer");
      continue;
    }
    const json* cls = member(rec, "class_id");
    const auto class_id =
        cls ? read_uint(*cls, std::numeric_limits<ClassId>::max())
            : std::nullopt;
    if (!class_id) {
      diags.add(ErrorKind::kSchema, i, field_path("detections", i, "class_id"),
                "missing or not a 32-bit non-negative integer");
      continue;
    }
    const json* score_value = member(rec, "score");
    const auto score = score_value ? read_score(*score_value) : std::nullopt;
    if (!score) {
      diags.add(ErrorKind::kSchema, i, field_path("detections", i, "score"),
                "missing or not a number");
      continue;
    }
    if (!std::isfinite(*score)) {
      diags.add(ErrorKind::kNonFiniteScore, i,
                field_path("detections", i, "score"),
                "score must be finite");
      continue;
    }
    const json* rle = member(rec, "rle");
    const std::string rle_field = field_path("detections", i, "rle");
    if (rle == nullptr) {
      diags.add(ErrorKind::kSchema, i, rle_field, "missing");
      continue;
    }
    auto runs = read_runs(*rle, i, rle_field, diags);
    if (!runs || bundle == nullptr) {
      continue;
    }
    const ImageRecord* image = bundle->find_image(*image_id);
    if (image == nullptr) {
      diags.add(ErrorKind::kUnknownImage, i,
                field_path("detections", i, "image_id"),
                "unknown image id '" + *image_id + "'");
      continue;
    }
    auto mask = make_mask(image->size, std::move(*runs), i, rle_field, diags);
    if (!mask) {
      continue;
    }
    out.push_back({*image_id, static_cast<ClassId>(*class_id), *score,
                   std::move(*mask)});
  }
  return out;
}

}  // namespace

DatasetBundle::DatasetBundle(std::vector<ImageRecord> images,
                             std::vector<GroundTruthInstance> ground_truth,
                             std::map<ClassId, std::string> class_names,
                             bool lenient)
    : images_(std::move(images)),
      ground_truth_(std::move(ground_truth)),
      class_names_(std::move(class_names)) {
  Diagnostics diags(lenient);
  for (std::size_t i = 0; i < images_.size(); ++i) {
    if (!image_index_.emplace(images_[i].id, i).second) {
      diags.add(ErrorKind::kSchema, i, field_path("images", i, "id"),
                "duplicate image id '" + images_[i].id + "'");
    }
  }
  for (std::size_t i = 0; i < ground_truth_.size(); ++i) {
    const auto& gt = ground_truth_[i];
    const ImageRecord* image = find_image(gt.image_id);
    if (image == nullptr) {
      diags.add(ErrorKind::kUnknownImage, i,
                field_path("annotations", i, "image_id"),
                "unknown image id '" + gt.image_id + "'");
    } else if (!(image->size == gt.mask.size())) {
      diags.add(ErrorKind::kSizeMismatch, i, field_path("annotations", i, "rle"),
                "mask size differs from image '" + gt.image_id + "'");
    } else if (area(gt.mask) == 0) {
      diags.add(ErrorKind::kEmptyMask, i, field_path("annotations", i, "rle"),
                "ground-truth mask has no foreground pixels");
    }
  }
  diags.throw_if_any();
}

const ImageRecord* DatasetBundle::find_image(const ImageId& id) const {
  auto it = image_index_.find(id);
  return it == image_index_.end() ? nullptr : &images_[it->second];
}

PredictionSet::PredictionSet(const DatasetBundle& bundle,
                             std::vector<Detection> detections, bool lenient)
    : detections_(std::move(detections)) {
  Diagnostics diags(lenient);
  for (std::size_t i = 0; i < detections_.size(); ++i) {
    const auto& det = detections_[i];
    const ImageRecord* image = bundle.find_image(det.image_id);
    if (image == nullptr) {
      diags.add(ErrorKind::kUnknownImage, i,
                field_path("detections", i, "image_id"),
                "unknown image id '" + det.image_id + "'");
    } else if (!(image->size == det.mask.size())) {
      diags.add(ErrorKind::kSizeMismatch, i, field_path("detections", i, "rle"),
                "mask size differs from image '" + det.image_id + "'");
    } else if (!std::isfinite(det.score)) {
      diags.add(ErrorKind::kNonFiniteScore, i,
                field_path("detections", i, "score"), "score must be finite");
    }
  }
  diags.throw_if_any();
}

DatasetBundle parse_ground_truth(std::string_view json_text,
                                 const LoadOptions& options) {
  const json root = parse_json(json_text);
  Diagnostics diags(options.lenient);
  auto parsed = parse_ground_truth_json(root, diags);
  diags.throw_if_any();
  return DatasetBundle(std::move(parsed.images), std::move(parsed.annotations),
                       std::move(parsed.class_names), options.lenient);
}

DatasetBundle load_ground_truth(const std::filesystem::path& path,
                                const LoadOptions& options) {
  return parse_ground_truth(read_text_file(path), options);
}

PredictionSet parse_predictions(std::string_view json_text,
                                const DatasetBundle& bundle,
                                const LoadOptions& options) {
  const json root = parse_json(json_text);
  Diagnostics diags(options.lenient);
  auto detections = parse_predictions_json(root, &bundle, diags);
  diags.throw_if_any();
  return PredictionSet(bundle, std::move(detections), options.lenient);
}

PredictionSet load_predictions(const std::filesystem::path& path,
                               const DatasetBundle& bundle,
                               const LoadOptions& options) {
  return parse_predictions(read_text_file(path), bundle, options);
}

std::vector<Diagnostic> check_ground_truth_file(
    const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    parse_ground_truth(text, LoadOptions{.lenient = true});
  } catch (const DatasetError& e) {
    return e.diagnostics();
  }
  return {};
}

std::vector<Diagnostic> check_predictions_file(
    const std::filesystem::path& path, const DatasetBundle* bundle) {
  const std::string text = read_text_file(path);
  try {
    const json root = parse_json(text);
    Diagnostics diags(/*lenient=*/true);
    parse_predictions_json(root, bundle, diags);
    return diags.take();
  } catch (const DatasetError& e) {
    return e.diagnostics();
  }
}

RleMask parse_mask(std::string_view json_text) {
  const json root = parse_json(json_text);
  Diagnostics diags(/*lenient=*/false);
  if (!root.is_object()) {
    diags.add(ErrorKind::kSchema, std::nullopt, "",
              "mask file must be a JSON object {height, width, rle}");
  }
  const json* h = member(root, "height");
  const json* w = member(root, "width");
  const auto height =
      h ? read_uint(*h, std::numeric_limits<std::uint32_t>::max())
        : std::nullopt;
  const auto width =
      w ? read_uint(*w, std::numeric_limits<std::uint32_t>::max())
        : std::nullopt;
  if (!height || !width) {
    diags.add(ErrorKind::kSchema, std::nullopt, height ? "width" : "height",
              "missing or not a 32-bit non-negative integer");
  }
  const json* rle = member(root, "rle");
  if (rle == nullptr) {
    diags.add(ErrorKind::kSchema, std::nullopt, "rle", "missing");
  }
  std::optional<ImageSize> size;
  try {
    size.emplace(static_cast<std::uint32_t>(*height),
                 static_cast<std::uint32_t>(*width));
  } catch (const Error& e) {
    diags.add(e.kind(), std::nullopt, "height", e.what());
  }
  auto runs = read_runs(*rle, std::nullopt, "rle", diags);
  return *make_mask(*size, std::move(*runs), std::nullopt, "rle", diags);
}

RleMask load_mask(const std::filesystem::path& path) {
  return parse_mask(read_text_file(path));
}

}  // namespace maskmetrics
