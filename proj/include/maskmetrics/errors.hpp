#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace maskmetrics {

enum class ErrorKind {
  kInvalidArgument,
  kInvalidSize,
  kInvalidEncoding,
  kSizeMismatch,
  kNonFiniteScore,
  kMixedImage,
  kEmptyInput,
  kParse,
  kSchema,
  kUnknownImage,
  kEmptyMask,
  kIo,
};

const char* to_string(ErrorKind kind);

// Base exception for everything the library throws on bad input.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// One validation finding at the ingestion boundary. `record` is the index
// into the offending array ("images", "annotations" or "detections") when
// the problem is attached to a record.
struct Diagnostic {
  ErrorKind kind = ErrorKind::kSchema;
  std::optional<std::size_t> record;
  std::string field;
  std::string message;

  std::string to_string() const;
};

// Thrown by the dataset loaders. Carries every diagnostic collected before
// aborting (exactly one unless lenient loading was requested).
class DatasetError : public Error {
 public:
  explicit DatasetError(std::vector<Diagnostic> diagnostics);

  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

}  // namespace maskmetrics
