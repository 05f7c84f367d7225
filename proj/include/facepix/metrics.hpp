#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "facepix/types.hpp"

namespace facepix {

struct FrameTally {
  std::int64_t frame = 0;
  int g = 0;         // ground-truth labels (streamer excluded, flagged included)
  int miss = 0;      // unmatched non-flagged labels
  int fp = 0;        // unmatched output mosaics
  int mismatch = 0;  // identity switches among matched non-flagged labels
  int matched = 0;   // matched non-flagged labels (c_t)
  int over_pix = 0;  // matched over_pixelation-flagged labels (op_t)
  double overlap_sum = 0.0;
};

struct MetricsReport {
  std::optional<double> mfpa;
  std::optional<double> mfpp;
  double opr = 0.0;
  std::int64_t mp = 0;
  bool nop_supported = true;  // no prior person count is ever required

  std::int64_t sum_g = 0, sum_miss = 0, sum_fp = 0, sum_mismatch = 0, sum_matched = 0, sum_over_pix = 0;
  double sum_overlap = 0.0;
  std::vector<FrameTally> per_frame;

  std::string to_text() const;
};

struct FrameMatchResult {
  std::vector<std::pair<int, int>> pairs;  // (output index, annotation index)
  std::vector<int> unmatched_outputs;
  std::vector<int> unmatched_annotations;
};

// One-to-one IoU assignment between one frame's mosaics and annotations.
FrameMatchResult match_frame(std::span<const BBox> outputs, std::span<const BBox> annotations,
                             double iou_floor);

// Full sequence evaluation against ground truth. Streamer annotations are not
// pixelation targets; a mosaic landing on one counts as a false positive.
MetricsReport evaluate(const std::vector<OutputBox>& outputs, const AnnotationSet& annotations,
                       double iou_floor = 0.3);

}  // namespace facepix
