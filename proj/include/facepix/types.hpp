#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace facepix {

// Axis-aligned box in pixel units, top-left origin. Coordinates stay
// fractional; clamping to frame bounds happens at render time only.
struct BBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double area() const { return w * h; }
  double cx() const { return x + w / 2.0; }
  double cy() const { return y + h / 2.0; }
  bool valid() const { return w > 0.0 && h > 0.0; }
};

double iou(const BBox& a, const BBox& b);
BBox union_box(const BBox& a, const BBox& b);
// Scales width/height by `factor` about the box center.
BBox dilate(const BBox& b, double factor);

struct Frame {
  std::int64_t index = 0;
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major interleaved RGB, 8bpc

  std::uint8_t* at(int px, int py) {
    return pixels.data() + 3 * (static_cast<std::size_t>(py) * width + px);
  }
  const std::uint8_t* at(int px, int py) const {
    return pixels.data() + 3 * (static_cast<std::size_t>(py) * width + px);
  }
};

struct FrameStream {
  int width = 0;
  int height = 0;
  int fps = 30;
  std::vector<Frame> frames;

  std::int64_t frame_count() const { return static_cast<std::int64_t>(frames.size()); }
};

inline constexpr int kFeatDim = 32;

// A face detection plus its unit-norm embedding and the 32-dim
// proposal-layer feature used by the two-sample test.
struct FaceVector {
  std::int64_t frame_index = 0;
  BBox bbox;
  double confidence = 1.0;
  std::vector<double> embedding;
  std::vector<double> feat32;
};

struct Segment {
  int index = 0;
  std::int64_t first_frame = 0;
  std::int64_t frame_count = 0;

  std::int64_t end_frame() const { return first_frame + frame_count; }
  bool contains(std::int64_t f) const { return f >= first_frame && f < end_frame(); }
};

enum class EntryStatus { detected, interpolated, refined };

const char* to_string(EntryStatus s);

struct TrajectoryEntry {
  BBox box;
  EntryStatus status = EntryStatus::detected;
  std::vector<double> feat32;  // present on detected/refined entries
};

// Per-person box timeline. Gap = frame with no entry.
struct Trajectory {
  int person_id = 0;
  bool is_streamer = false;
  std::map<std::int64_t, TrajectoryEntry> entries;

  std::int64_t first_frame() const { return entries.empty() ? -1 : entries.begin()->first; }
  std::int64_t last_frame() const { return entries.empty() ? -1 : entries.rbegin()->first; }
};

// Proposal-network style candidate inside a gap region.
struct Candidate {
  std::int64_t frame_index = 0;
  BBox bbox;
  double score = 1.0;
  std::vector<double> feat32;
};

struct Annotation {
  std::int64_t frame = 0;
  int person_id = 0;
  BBox box;
  bool is_streamer = false;
  bool over_pixelation = false;
};

struct AnnotationSet {
  std::vector<Annotation> items;  // kept sorted by (frame, person_id)

  void sort();
  std::int64_t max_frame() const;
};

// One rendered mosaic, as logged by the renderer for evaluation.
struct OutputBox {
  std::int64_t frame = 0;
  int person_id = 0;
  BBox box;
};

}  // namespace facepix
