#include "facepix/provider.hpp"

#include <algorithm>
#include <stdexcept>

namespace facepix {

namespace {

bool center_inside(const BBox& box, const BBox& region) {
  const double cx = box.cx(), cy = box.cy();
  return cx >= region.x && cx <= region.x + region.w && cy >= region.y && cy <= region.y + region.h;
}

}  // namespace

FileProvider::FileProvider(std::vector<FaceVector> detections, std::vector<Candidate> candidates,
                           std::int64_t frame_count)
    : detections_(std::move(detections)), candidates_(std::move(candidates)), frame_count_(frame_count) {
  for (const FaceVector& d : detections_)
    if (d.frame_index < 0 || d.frame_index >= frame_count_)
      throw std::runtime_error("detection at frame " + std::to_string(d.frame_index) +
                               " outside the stream's " + std::to_string(frame_count_) + " frames");
}

std::vector<std::vector<FaceVector>> FileProvider::detect_and_embed(const Segment& segment) const {
  if (segment.end_frame() > frame_count_)
    throw std::runtime_error("provider exhausted: segment ends past the ingested stream");
  std::vector<std::vector<FaceVector>> out(static_cast<std::size_t>(segment.frame_count));
  const auto lo = std::lower_bound(
      detections_.begin(), detections_.end(), segment.first_frame,
      [](const FaceVector& d, std::int64_t f) { return d.frame_index < f; });
  for (auto it = lo; it != detections_.end() && it->frame_index < segment.end_frame(); ++it)
    out[it->frame_index - segment.first_frame].push_back(*it);
  return out;
}

std::vector<Candidate> FileProvider::propose_in_gaps(const std::vector<GapQuery>& queries) const {
  std::vector<Candidate> out;
  for (const GapQuery& q : queries) {
    const auto lo = std::lower_bound(candidates_.begin(), candidates_.end(), q.frame,
                                     [](const Candidate& c, std::int64_t f) { return c.frame_index < f; });
    for (auto it = lo; it != candidates_.end() && it->frame_index == q.frame; ++it)
      if (center_inside(it->bbox, q.region)) out.push_back(*it);
  }
  return out;
}

std::vector<std::vector<FaceVector>> SyntheticProvider::detect_and_embed(const Segment& segment) const {
  if (segment.end_frame() > frame_count())
    throw std::runtime_error("provider exhausted: segment ends past the scenario");
  std::vector<std::vector<FaceVector>> out(static_cast<std::size_t>(segment.frame_count));
  for (std::int64_t f = segment.first_frame; f < segment.end_frame(); ++f)
    out[f - segment.first_frame] = dataset_->detections_by_frame[f];
  return out;
}

std::vector<Candidate> SyntheticProvider::propose_in_gaps(const std::vector<GapQuery>& queries) const {
  std::vector<Candidate> out;
  for (const GapQuery& q : queries) {
    if (q.frame < 0 || q.frame >= frame_count()) continue;
    for (const Candidate& c : dataset_->candidates_by_frame[q.frame])
      if (center_inside(c.bbox, q.region)) out.push_back(c);
  }
  return out;
}

}  // namespace facepix
