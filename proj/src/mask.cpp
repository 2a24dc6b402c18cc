#include "maskmetrics/mask.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <utility>

#include "maskmetrics/errors.hpp"

namespace maskmetrics {

ImageSize::ImageSize(std::uint32_t height, std::uint32_t width)
    : height_(height), width_(width) {
  if (height == 0 || width == 0) {
    throw Error(ErrorKind::kInvalidSize,
                "image size must be at least 1x1, got " +
                    std::to_string(height) + "x" + std::to_string(width));
  }
  if (pixel_count() > kMaxPixels) {
    throw Error(ErrorKind::kInvalidSize,
                "image size " + std::to_string(height) + "x" +
                    std::to_string(width) + " exceeds 2^32 pixels");
  }
}

BitMask::BitMask(ImageSize size)
    : size_(size), bits_(size.pixel_count(), 0) {}

BitMask::BitMask(ImageSize size, std::vector<std::uint8_t> bits)
    : size_(size), bits_(std::move(bits)) {
  if (bits_.size() != size_.pixel_count()) {
    throw Error(ErrorKind::kInvalidEncoding,
                "bitmask has " + std::to_string(bits_.size()) +
                    " pixels, expected " +
                    std::to_string(size_.pixel_count()));
  }
  for (auto& bit : bits_) {
    bit = bit != 0 ? 1 : 0;
  }
}

BitMask BitMask::with_pixel(std::uint64_t index, bool value) const {
  BitMask copy = *this;
  copy.bits_.at(index) = value ? 1 : 0;
  return copy;
}

RleMask::RleMask(ImageSize size, std::vector<std::uint64_t> runs)
    : size_(size), runs_(std::move(runs)) {
  if (runs_.empty()) {
    throw Error(ErrorKind::kInvalidEncoding, "RLE has no runs");
  }
  const std::uint64_t expected = size_.pixel_count();
  std::uint64_t total = 0;
  bool overflow = false;
  for (std::size_t i = 0; i < runs_.size(); ++i) {
    if (i > 0 && runs_[i] == 0) {
      throw Error(ErrorKind::kInvalidEncoding,
                  "RLE run " + std::to_string(i) +
                      " is zero; only the first run may be empty");
    }
    if (runs_[i] > expected - std::min(total, expected)) {
      overflow = true;
    }
    total += overflow ? 0 : runs_[i];
  }
  if (overflow || total != expected) {
    throw Error(ErrorKind::kInvalidEncoding,
                "RLE runs sum to " +
                    (overflow ? std::string("more than ") + std::to_string(expected)
                              : std::to_string(total)) +
                    ", expected " + std::to_string(expected));
  }
}

RleMask RleMask::empty(ImageSize size) {
  return RleMask(size, {size.pixel_count()});
}

RleMask encode_rle(const BitMask& mask) {
  const auto bits = mask.bits();
  std::vector<std::uint64_t> runs;
  std::uint8_t current = 0;
  std::uint64_t length = 0;
  for (std::uint8_t bit : bits) {
    if (bit != current) {
      runs.push_back(length);
      current = bit;
      length = 0;
    }
    ++length;
  }
  runs.push_back(length);
  return RleMask(mask.size(), std::move(runs));
}

BitMask decode_rle(const RleMask& mask) {
  std::vector<std::uint8_t> bits(mask.size().pixel_count(), 0);
  std::uint64_t pos = 0;
  const auto runs = mask.runs();
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (i % 2 == 1) {
      std::fill_n(bits.begin() + static_cast<std::ptrdiff_t>(pos),
                  static_cast<std::ptrdiff_t>(runs[i]), std::uint8_t{1});
    }
    pos += runs[i];
  }
  return BitMask(mask.size(), std::move(bits));
}

std::uint64_t area(const RleMask& mask) {
  const auto runs = mask.runs();
  std::uint64_t total = 0;
  for (std::size_t i = 1; i < runs.size(); i += 2) {
    total += runs[i];
  }
  return total;
}

namespace {

// Walks the foreground intervals [begin, end) of a canonical run list.
class ForegroundCursor {
 public:
  explicit ForegroundCursor(std::span<const std::uint64_t> runs)
      : runs_(runs) {
    begin_ = runs_[0];
    end_ = runs_.size() > 1 ? begin_ + runs_[1] : begin_;
  }

  bool done() const { return next_ >= runs_.size(); }
  std::uint64_t begin() const { return begin_; }
  std::uint64_t end() const { return end_; }

  void advance() {
    next_ += 2;
    if (done()) {
      return;
    }
    begin_ = end_ + runs_[next_ - 1];
    end_ = begin_ + runs_[next_];
  }

 private:
  std::span<const std::uint64_t> runs_;
  // Index of the foreground run the cursor currently sits on.
  std::size_t next_ = 1;
  std::uint64_t begin_ = 0;
  std::uint64_t end_ = 0;
};

void require_same_size(const RleMask& a, const RleMask& b) {
  if (!(a.size() == b.size())) {
    throw Error(ErrorKind::kSizeMismatch,
                "mask sizes differ: " + std::to_string(a.size().height()) +
                    "x" + std::to_string(a.size().width()) + " vs " +
                    std::to_string(b.size().height()) + "x" +
                    std::to_string(b.size().width()));
  }
}

}  // namespace

std::uint64_t intersection_area(const RleMask& a, const RleMask& b) {
  require_same_size(a, b);
  ForegroundCursor ca(a.runs());
  ForegroundCursor cb(b.runs());
  std::uint64_t total = 0;
  while (!ca.done() && !cb.done()) {
    const std::uint64_t lo = std::max(ca.begin(), cb.begin());
    const std::uint64_t hi = std::min(ca.end(), cb.end());
    if (hi > lo) {
      total += hi - lo;
    }
    if (ca.end() <= cb.end()) {
      ca.advance();
    } else {
      cb.advance();
    }
  }
  return total;
}

double OverlapCounts::iou() const {
  if (union_area == 0) {
    return 0.0;
  }
  return static_cast<double>(intersection) / static_cast<double>(union_area);
}

OverlapCounts overlap(const RleMask& a, const RleMask& b) {
  const std::uint64_t inter = intersection_area(a, b);
  return {inter, area(a) + area(b) - inter};
}

double iou(const RleMask& a, const RleMask& b) { return overlap(a, b).iou(); }

}  // namespace maskmetrics
