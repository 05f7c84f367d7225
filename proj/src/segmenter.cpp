#include "facepix/segmenter.hpp"

#include <algorithm>
#include <stdexcept>

namespace facepix {

ScheduleEntry broadcast_schedule(std::int64_t frame, int segment_frames, double fps) {
  if (segment_frames < 1) throw std::invalid_argument("segment_frames must be >= 1");
  if (fps <= 0.0) throw std::invalid_argument("fps must be positive");
  const double n = static_cast<double>(segment_frames);
  ScheduleEntry e;
  e.frame = frame;
  // frames are 0-based: the segment holding f finishes recording after
  // (floor(f/N)+1)*N frames
  e.record_complete_time = static_cast<double>(frame / segment_frames + 1) * n / fps;
  e.process_deadline = e.record_complete_time + n / fps;
  e.broadcast_frame_number = frame + 2 * static_cast<std::int64_t>(segment_frames);
  return e;
}

std::vector<Segment> segmentize(std::int64_t frame_count, int segment_frames) {
  if (segment_frames < 1) throw std::invalid_argument("segment_frames must be >= 1");
  std::vector<Segment> out;
  std::int64_t first = 0;
  int index = 0;
  while (first < frame_count) {
    const std::int64_t count = std::min<std::int64_t>(segment_frames, frame_count - first);
    out.push_back(Segment{index++, first, count});
    first += count;
  }
  return out;
}

ContinuityVerdict simulate_continuity(std::int64_t frame_count, int segment_frames, double fps,
                                      double per_segment_cost_seconds) {
  if (fps <= 0.0) throw std::invalid_argument("fps must be positive");
  ContinuityVerdict v;
  const auto segments = segmentize(frame_count, segment_frames);
  double lane_free_at = 0.0;
  for (const Segment& seg : segments) {
    const double recorded_at = static_cast<double>(seg.end_frame()) / fps;
    const double start = std::max(recorded_at, lane_free_at);
    const double done = start + per_segment_cost_seconds;
    lane_free_at = done;
    for (std::int64_t f = seg.first_frame; f < seg.end_frame(); ++f) {
      const double due = static_cast<double>(f + 2 * segment_frames) / fps;
      if (done > due) {
        v.continuous = false;
        v.first_stall_frame = f;
        v.first_stall_segment = seg.index;
        v.lateness_seconds = done - due;
        return v;
      }
    }
  }
  return v;
}

}  // namespace facepix
