#include "facepix/nms.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace facepix {

std::vector<Candidate> nms(const std::vector<Candidate>& candidates, double iou_threshold) {
  if (iou_threshold <= 0.0 || iou_threshold > 1.0)
    throw std::invalid_argument("nms iou_threshold must be in (0,1]");

  std::vector<int> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (candidates[a].score != candidates[b].score) return candidates[a].score > candidates[b].score;
    return a < b;
  });

  std::vector<Candidate> kept;
  for (int idx : order) {
    const Candidate& c = candidates[idx];
    bool suppressed = false;
    for (const Candidate& k : kept) {
      if (iou(c.bbox, k.bbox) >= iou_threshold) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) kept.push_back(c);
  }
  return kept;
}

}  // namespace facepix
