#include "facepix/render.hpp"

#include <algorithm>
#include <stdexcept>

#include "facepix/blur.hpp"

namespace facepix {

std::vector<OutputBox> render_frames(FrameStream& stream, const std::vector<Trajectory>& trajectories,
                                     std::int64_t first_frame, std::int64_t end_frame,
                                     const RenderParams& params) {
  first_frame = std::max<std::int64_t>(first_frame, 0);
  end_frame = std::min<std::int64_t>(end_frame, stream.frame_count());

  for (const Trajectory& t : trajectories) {
    if (t.entries.empty()) continue;
    if (t.first_frame() < 0 || t.last_frame() >= stream.frame_count())
      throw std::out_of_range("trajectory for person " + std::to_string(t.person_id) +
                              " references a frame outside the stream");
  }

  // per-frame work lists, person-ordered so overlapping mosaics compose
  // deterministically
  const std::int64_t n = end_frame - first_frame;
  if (n <= 0) return {};
  std::vector<std::vector<OutputBox>> work(static_cast<std::size_t>(n));
  for (const Trajectory& t : trajectories) {
    if (t.is_streamer) continue;
    for (const auto& [frame, entry] : t.entries) {
      if (frame < first_frame || frame >= end_frame) continue;
      work[frame - first_frame].push_back(OutputBox{frame, t.person_id, entry.box});
    }
  }
  for (auto& boxes : work)
    std::sort(boxes.begin(), boxes.end(),
              [](const OutputBox& a, const OutputBox& b) { return a.person_id < b.person_id; });

#pragma omp parallel for schedule(dynamic) if (params.parallel && n > 1)
  for (std::int64_t i = 0; i < n; ++i) {
    Frame& frame = stream.frames[first_frame + i];
    for (const OutputBox& b : work[i]) {
      const double sigma = params.sigma_mode == "fixed" ? params.sigma : auto_sigma(b.box);
      gaussian_blur_region(frame, b.box, sigma, radius_for_sigma(sigma), /*parallel=*/false);
    }
  }

  std::vector<OutputBox> out;
  for (const auto& boxes : work) out.insert(out.end(), boxes.begin(), boxes.end());
  return out;
}

std::vector<OutputBox> render_stream(FrameStream& stream, const std::vector<Trajectory>& trajectories,
                                     const RenderParams& params) {
  return render_frames(stream, trajectories, 0, stream.frame_count(), params);
}

std::optional<int> designate_streamer(const std::vector<Trajectory>& trajectories, std::int64_t frame,
                                      const BBox& designation, double iou_floor) {
  std::optional<int> best_person;
  double best_iou = 0.0;
  for (const Trajectory& t : trajectories) {
    const auto it = t.entries.find(frame);
    if (it == t.entries.end()) continue;
    const double overlap = iou(it->second.box, designation);
    if (overlap < iou_floor) continue;
    if (!best_person || overlap > best_iou || (overlap == best_iou && t.person_id < *best_person)) {
      best_iou = overlap;
      best_person = t.person_id;
    }
  }
  return best_person;
}

}  // namespace facepix
