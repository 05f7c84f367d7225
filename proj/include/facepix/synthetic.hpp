#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "facepix/types.hpp"

namespace facepix {

using FrameInterval = std::pair<std::int64_t, std::int64_t>;  // inclusive

struct PersonSpec {
  bool streamer = false;
  std::vector<std::pair<std::int64_t, BBox>> path_keys;  // keyframes, linear in between
  std::vector<FrameInterval> occlude;  // present but un-identifiable -> over_pixelation
  std::vector<FrameInterval> miss;     // visible but the detector loses it
  std::vector<FrameInterval> absent;   // not in the scene at all
};

// Deterministic desk-scale scene: identity embedding centers, box paths,
// detector noise model, and matching ground truth.
struct SyntheticScenario {
  std::uint64_t seed = 1;
  std::int64_t frames = 0;
  int width = 320;
  int height = 240;
  int fps = 30;
  int embedding_dim = 512;
  double embed_jitter = 0.05;       // expected embedding perturbation norm
  double embed_drift = 0.0;         // slow per-person rotation of the identity
                                    // center across the stream, in radians
  double feat_jitter = 0.05;        // per-coordinate feat32 noise
  double miss_rate = 0.0;           // Bernoulli per visible face
  double fp_rate = 0.0;             // expected false detections per frame
  double center_separation = 0.5;   // pairwise cosine of identity centers stays below this
  int occlusion_candidates = 2;     // background proposals per occluded face frame

  std::vector<PersonSpec> persons;

  static SyntheticScenario from_file(const std::string& path);
  static SyntheticScenario from_string(const std::string& text);
};

struct SyntheticDataset {
  FrameStream stream;
  std::vector<std::vector<FaceVector>> detections_by_frame;
  std::vector<std::vector<Candidate>> candidates_by_frame;
  AnnotationSet annotations;

  std::vector<std::vector<double>> identity_centers;  // unit vectors, per person
  std::vector<std::vector<double>> projection;        // fixed 32 x D feat map

  std::vector<FaceVector> all_detections() const;
  std::vector<Candidate> all_candidates() const;
};

// Fully deterministic in the scenario (seed included). Frames, detections,
// candidates, and annotations are mutually consistent.
SyntheticDataset synth_generate(const SyntheticScenario& scenario);

// The ground-truth box of one person at one frame (path interpolation).
BBox path_box_at(const PersonSpec& person, std::int64_t frame);

}  // namespace facepix
