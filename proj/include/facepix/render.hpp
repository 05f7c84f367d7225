#pragma once

#include <optional>
#include <string>
#include <vector>

#include "facepix/types.hpp"

namespace facepix {

struct RenderParams {
  std::string sigma_mode = "auto";  // "auto" = max(w,h)/6 per box, "fixed" = sigma below
  double sigma = 8.0;
  bool parallel = true;
};

// Blurs every non-streamer entry (detected/interpolated/refined) of the given
// trajectories over frames [first_frame, end_frame) and returns one OutputBox
// per rendered mosaic, ordered by (frame, person). A trajectory entry outside
// the stream is a hard error.
std::vector<OutputBox> render_frames(FrameStream& stream, const std::vector<Trajectory>& trajectories,
                                     std::int64_t first_frame, std::int64_t end_frame,
                                     const RenderParams& params);

// Whole-stream convenience wrapper.
std::vector<OutputBox> render_stream(FrameStream& stream, const std::vector<Trajectory>& trajectories,
                                     const RenderParams& params);

// Trajectory with the highest-IoU box at `frame` against the designation box,
// subject to IoU >= iou_floor; ties go to the lower person id.
std::optional<int> designate_streamer(const std::vector<Trajectory>& trajectories, std::int64_t frame,
                                      const BBox& designation, double iou_floor = 0.3);

}  // namespace facepix
