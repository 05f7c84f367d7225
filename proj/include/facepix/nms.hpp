#pragma once

#include <vector>

#include "facepix/types.hpp"

namespace facepix {

// Greedy non-maximum suppression over one frame's candidates. Candidates are
// taken in descending score order (ties: lower original index); a candidate
// is kept iff its IoU with every kept box is below `iou_threshold`.
std::vector<Candidate> nms(const std::vector<Candidate>& candidates, double iou_threshold);

}  // namespace facepix
