#pragma once

#include <vector>

#include "facepix/elr.hpp"
#include "facepix/types.hpp"

namespace facepix {

struct CandidateChain {
  std::vector<Candidate> items;  // ordered by frame, one per frame

  std::int64_t first_frame() const { return items.front().frame_index; }
  std::int64_t last_frame() const { return items.back().frame_index; }
};

// Links per-frame candidates into chains by frame-to-frame optimal
// assignment on 1-IoU cost; pairs under `iou_floor` stay unmatched and seed
// new chains.
std::vector<CandidateChain> associate_candidates(const std::vector<Candidate>& candidates,
                                                 double iou_floor);

struct RefinerParams {
  double elr_threshold = 3.8414588206941254;  // chi-square df=1, 0.95 quantile
  double hungarian_iou_floor = 0.1;
  int min_candidate_len = 2;
  double nms_iou = 0.7;
};

// Tests one candidate chain against the raw trajectory: the chain's feature
// rows against the nearest-in-time detected rows of the trajectory.
ELRResult test_candidate_chain(const Trajectory& trajectory, const CandidateChain& chain,
                               double threshold);

struct RefineOutcome {
  int chains_formed = 0;
  int accepted = 0;
  int rejected = 0;
  int too_short = 0;
  int filled_frames = 0;
};

// Full refinement of one trajectory from its gap candidates (already NMS'd
// and restricted to gap frames): associate, test, fill accepted chains
// (detected entries always win), then re-interpolate.
RefineOutcome refine_trajectory(Trajectory& trajectory, const std::vector<Candidate>& gap_candidates,
                                const RefinerParams& params, int max_break);

}  // namespace facepix
