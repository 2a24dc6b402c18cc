#include "maskmetrics/errors.hpp"

#include <utility>

namespace maskmetrics {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid-argument";
    case ErrorKind::kInvalidSize: return "invalid-size";
    case ErrorKind::kInvalidEncoding: return "invalid-encoding";
    case ErrorKind::kSizeMismatch: return "size-mismatch";
    case ErrorKind::kNonFiniteScore: return "non-finite-score";
    case ErrorKind::kMixedImage: return "mixed-image-id";
    case ErrorKind::kEmptyInput: return "empty-input";
    case ErrorKind::kParse: return "parse-error";
    case ErrorKind::kSchema: return "schema";
    case ErrorKind::kUnknownImage: return "unknown-image";
    case ErrorKind::kEmptyMask: return "empty-mask";
    case ErrorKind::kIo: return "io-error";
  }
  return "unknown";
}

std::string Diagnostic::to_string() const {
  std::string out = maskmetrics::to_string(kind);
  if (record) {
    out += " [record " + std::to_string(*record) + "]";
  }
  if (!field.empty()) {
    out += " " + field;
  }
  out += ": " + message;
  return out;
}

namespace {

std::string join_diagnostics(const std::vector<Diagnostic>& diagnostics) {
  if (diagnostics.empty()) {
    return "validation failed";
  }
  std::string out = diagnostics.front().to_string();
  if (diagnostics.size() > 1) {
    out += " (and " + std::to_string(diagnostics.size() - 1) + " more)";
  }
  return out;
}

}  // namespace

DatasetError::DatasetError(std::vector<Diagnostic> diagnostics)
    : Error(diagnostics.empty() ? ErrorKind::kSchema : diagnostics.front().kind,
            join_diagnostics(diagnostics)),
      diagnostics_(std::move(diagnostics)) {}

}  // namespace maskmetrics
