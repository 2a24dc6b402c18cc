#include "maskmetrics/oracle.hpp"

#include <cstdint>

#include "maskmetrics/errors.hpp"

namespace maskmetrics::oracle {

OverlapCounts oracle_overlap(const BitMask& a, const BitMask& b) {
  if (!(a.size() == b.size())) {
    throw Error(ErrorKind::kSizeMismatch, "oracle_overlap: mask sizes differ");
  }
  OverlapCounts counts;
  for (std::uint32_t row = 0; row < a.size().height(); ++row) {
    for (std::uint32_t col = 0; col < a.size().width(); ++col) {
      const bool in_a = a.at(row, col);
      const bool in_b = b.at(row, col);
      if (in_a && in_b) {
        ++counts.intersection;
      }
      if (in_a || in_b) {
        ++counts.union_area;
      }
    }
  }
  return counts;
}

double oracle_iou(const BitMask& a, const BitMask& b) {
  const OverlapCounts counts = oracle_overlap(a, b);
  if (counts.union_area == 0) {
    return 0.0;
  }
  return static_cast<double>(counts.intersection) /
         static_cast<double>(counts.union_area);
}

double oracle_ap(const std::vector<bool>& tp_flags) {
  double rel_total = 0;
  double n = 0;
  double numerator = 0;
  for (bool is_relevant : tp_flags) {
    n += 1;
    if (is_relevant) {
      rel_total += 1;
      numerator += rel_total / n;
    }
  }
  if (rel_total == 0) {
    return 0.0;
  }
  return numerator / rel_total;
}

}  // namespace maskmetrics::oracle
