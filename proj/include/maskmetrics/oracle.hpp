#pragma once

// Slow pixel-by-pixel and line-by-line reference implementations. They exist
// so the fast paths can be checked against something obviously correct and
// are only built when MASKMETRICS_WITH_ORACLE is on.

#include <vector>

#include "maskmetrics/mask.hpp"

namespace maskmetrics::oracle {

// Counts intersection and union over every pixel position.
OverlapCounts oracle_overlap(const BitMask& a, const BitMask& b);
double oracle_iou(const BitMask& a, const BitMask& b);

// Literal transcription of the ranked-precision AP loop.
double oracle_ap(const std::vector<bool>& tp_flags);

}  // namespace maskmetrics::oracle
