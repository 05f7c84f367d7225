#pragma once

#include <optional>
#include <string>
#include <vector>

#include "facepix/ap_cluster.hpp"
#include "facepix/config.hpp"
#include "facepix/provider.hpp"
#include "facepix/refiner.hpp"
#include "facepix/render.hpp"
#include "facepix/segmenter.hpp"
#include "facepix/types.hpp"

namespace facepix {

struct EngineConfig {
  int segment_frames = 150;
  int fps = 30;
  int embedding_dim = 512;

  ap::Params cluster;

  int max_break = 5;
  double gap_dilation = 1.5;
  double nms_iou = 0.7;

  double elr_confidence = 0.95;
  std::optional<double> elr_threshold_override;
  double hungarian_iou_floor = 0.1;
  int min_candidate_len = 2;
  bool refine = true;

  std::string blur_sigma_mode = "auto";
  double blur_sigma = 8.0;

  std::optional<BBox> streamer_bbox;
  std::int64_t streamer_frame = 0;

  int nonconvergence_budget = 3;
  std::optional<double> segment_cost;  // seconds, for the continuity verdict
  bool parallel = true;

  double elr_threshold() const;
  static EngineConfig from(const Config& cfg);
};

struct SegmentLogEntry {
  int segment = 0;
  std::int64_t first_frame = 0;
  std::int64_t frame_count = 0;
  int faces = 0;
  int withheld = 0;
  int iterations = 0;
  bool converged = true;
  int exclusion_fixes = 0;
  int active_vectors = 0;
  int chains = 0;
  int accepted = 0;
  int rejected = 0;
  int refined_frames = 0;
  double wall_ms = 0.0;
};

struct RunLog {
  std::vector<SegmentLogEntry> segments;
  std::vector<std::string> warnings;
  std::optional<int> streamer_person;
  ContinuityVerdict continuity;        // under the configured cost model
  double modeled_segment_cost = 0.0;   // seconds fed to the verdict
  int nonconverged_segments = 0;
  long long lag_violations = 0;        // broadcast lag != 2N (must stay 0)

  std::string to_text(int segment_frames, int fps) const;
};

struct RunResult {
  FrameStream output;
  std::vector<OutputBox> boxes;
  std::vector<Trajectory> trajectories;
  RunLog log;
};

// Full pipeline: per segment detect/embed -> cluster -> interpolate ->
// propose+test -> fill -> interpolate -> blur, then emit on the f+2N
// broadcast schedule. Throws on provider mismatch or when more segments fail
// to converge than the configured budget.
RunResult run_pipeline(const FrameStream& input, const VectorProvider& provider,
                       const EngineConfig& cfg);

}  // namespace facepix
