#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "facepix/types.hpp"

namespace facepix {

// Groups labelled face vectors into per-person trajectories with `detected`
// entries. Two same-frame vectors under one label signal a clustering bug
// and throw.
std::vector<Trajectory> build_raw(const std::vector<FaceVector>& vectors,
                                  const std::vector<int>& labels);

// Adds one segment's labelled detections onto an existing trajectory map.
void append_detections(std::vector<Trajectory>& trajectories, const std::vector<FaceVector>& vectors,
                       const std::vector<int>& labels);

// Fills missing runs of length <= max_break between two known entries with
// linearly interpolated boxes. Never extrapolates beyond the first/last
// observation; existing entries are never overwritten. Idempotent.
void interpolate_breaks(Trajectory& trajectory, int max_break);

// A maximal missing run. Flanks are the nearest known frames on each side;
// at a stream edge only one flank exists.
struct Gap {
  std::int64_t first = 0;
  std::int64_t last = 0;  // inclusive
  std::optional<std::int64_t> left_flank;
  std::optional<std::int64_t> right_flank;

  std::int64_t length() const { return last - first + 1; }
};

// Missing runs of `trajectory` within the frame window [w0, w1). Runs whose
// right side has no observation yet (trailing runs) are skipped: nothing can
// vouch for them at processing time. Leading runs keep only a right flank.
std::vector<Gap> find_gaps(const Trajectory& trajectory, std::int64_t w0, std::int64_t w1);

struct GapQuery {
  std::int64_t frame = 0;
  BBox region;
};

// Per-frame proposal search neighbourhoods: the union of the flanking known
// boxes dilated by `dilation` (single flank at stream edges).
std::vector<GapQuery> gap_regions(const Trajectory& trajectory, const std::vector<Gap>& gaps,
                                  double dilation);

}  // namespace facepix
