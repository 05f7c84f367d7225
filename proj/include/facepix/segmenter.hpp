#pragma once

#include <cstdint>
#include <vector>

#include "facepix/types.hpp"

namespace facepix {

// Broadcast bookkeeping for one frame under segment-batched processing.
// A frame recorded at index f is broadcast at index f + 2N, so the output
// keeps the input's frame spacing (constant 2N lag).
struct ScheduleEntry {
  std::int64_t frame = 0;
  double record_complete_time = 0.0;   // seconds: when the frame's segment finishes recording
  double process_deadline = 0.0;       // record_complete_time + N/FPS processing budget
  std::int64_t broadcast_frame_number = 0;
};

ScheduleEntry broadcast_schedule(std::int64_t frame, int segment_frames, double fps);

// Consecutive non-overlapping N-frame segments; the final one may be shorter.
std::vector<Segment> segmentize(std::int64_t frame_count, int segment_frames);

struct ContinuityVerdict {
  bool continuous = true;
  std::int64_t first_stall_frame = -1;
  int first_stall_segment = -1;
  double lateness_seconds = 0.0;  // how late the first stalled frame is
};

// Replays the segment timeline assuming every segment costs
// `per_segment_cost_seconds` to process (a single processing lane, segments
// in order). Continuous iff every frame is ready by its broadcast time.
ContinuityVerdict simulate_continuity(std::int64_t frame_count, int segment_frames, double fps,
                                      double per_segment_cost_seconds);

}  // namespace facepix
