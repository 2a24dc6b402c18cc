#pragma once

// Binary instance masks and their set operations.
//
// Masks live on a row-major raster with the origin at the top-left pixel:
// pixel (row, col) has linear index row * width + col. RleMask stores the
// same raster as alternating background/foreground run lengths, always
// starting with a (possibly empty) background run. All values are immutable
// once constructed and every operation is a pure function.

#include <cstdint>
#include <span>
#include <vector>

namespace maskmetrics {

class ImageSize {
 public:
  static constexpr std::uint64_t kMaxPixels = std::uint64_t{1} << 32;

  // Throws Error(kInvalidSize) unless height, width >= 1 and
  // height * width <= 2^32.
  ImageSize(std::uint32_t height, std::uint32_t width);

  std::uint32_t height() const { return height_; }
  std::uint32_t width() const { return width_; }
  std::uint64_t pixel_count() const {
    return std::uint64_t{height_} * width_;
  }

  friend bool operator==(const ImageSize&, const ImageSize&) = default;

 private:
  std::uint32_t height_;
  std::uint32_t width_;
};

class BitMask {
 public:
  // All-background mask.
  explicit BitMask(ImageSize size);
  // `bits` holds one byte per pixel (0 = background, anything else =
  // foreground) in row-major order. Throws Error(kInvalidEncoding) when the
  // length does not equal size.pixel_count().
  BitMask(ImageSize size, std::vector<std::uint8_t> bits);

  const ImageSize& size() const { return size_; }
  std::span<const std::uint8_t> bits() const { return bits_; }

  bool at(std::uint32_t row, std::uint32_t col) const {
    return bits_[std::uint64_t{row} * size_.width() + col] != 0;
  }

  // Returns a copy with one pixel changed.
  BitMask with_pixel(std::uint64_t index, bool value) const;

  friend bool operator==(const BitMask&, const BitMask&) = default;

 private:
  ImageSize size_;
  std::vector<std::uint8_t> bits_;
};

class RleMask {
 public:
  // Validates the canonical form: runs sum to size.pixel_count(), every run
  // after the first is positive. Throws Error(kInvalidEncoding) otherwise.
  RleMask(ImageSize size, std::vector<std::uint64_t> runs);

  // All-background mask of the given size.
  static RleMask empty(ImageSize size);

  const ImageSize& size() const { return size_; }
  std::span<const std::uint64_t> runs() const { return runs_; }

  friend bool operator==(const RleMask&, const RleMask&) = default;

 private:
  ImageSize size_;
  std::vector<std::uint64_t> runs_;
};

RleMask encode_rle(const BitMask& mask);
BitMask decode_rle(const RleMask& mask);

// Number of foreground pixels, summed over the odd-indexed runs.
std::uint64_t area(const RleMask& mask);

// |a ∩ b| via a merge over the two run sequences; never decodes pixels.
// Throws Error(kSizeMismatch) when the sizes differ.
std::uint64_t intersection_area(const RleMask& a, const RleMask& b);

// Integer ingredients of an IoU value.
struct OverlapCounts {
  std::uint64_t intersection = 0;
  std::uint64_t union_area = 0;

  // intersection / union, or exactly 0.0 when the union is empty.
  double iou() const;

  friend bool operator==(const OverlapCounts&, const OverlapCounts&) = default;
};

OverlapCounts overlap(const RleMask& a, const RleMask& b);

// Intersection over union in [0, 1]. Two empty masks have IoU 0.0, so an
// empty prediction never matches an empty reference. Throws
// Error(kSizeMismatch) when the sizes differ.
double iou(const RleMask& a, const RleMask& b);

}  // namespace maskmetrics
