#pragma once

#include <memory>
#include <vector>

#include "facepix/synthetic.hpp"
#include "facepix/trajectory.hpp"
#include "facepix/types.hpp"

namespace facepix {

// Source of per-frame face vectors and gap-region proposal candidates.
// Implementations are read-only after construction.
class VectorProvider {
 public:
  virtual ~VectorProvider() = default;

  // Face vectors for each frame of the segment, indexed frame-relative.
  virtual std::vector<std::vector<FaceVector>> detect_and_embed(const Segment& segment) const = 0;

  // Candidates whose box center falls inside the queried region, per query
  // frame. Recall-oriented: false positives are expected.
  virtual std::vector<Candidate> propose_in_gaps(const std::vector<GapQuery>& queries) const = 0;

  virtual std::int64_t frame_count() const = 0;
};

// Replays previously ingested detection/candidate records.
class FileProvider : public VectorProvider {
 public:
  FileProvider(std::vector<FaceVector> detections, std::vector<Candidate> candidates,
               std::int64_t frame_count);

  std::vector<std::vector<FaceVector>> detect_and_embed(const Segment& segment) const override;
  std::vector<Candidate> propose_in_gaps(const std::vector<GapQuery>& queries) const override;
  std::int64_t frame_count() const override { return frame_count_; }

 private:
  std::vector<FaceVector> detections_;  // sorted by frame
  std::vector<Candidate> candidates_;   // sorted by frame
  std::int64_t frame_count_;
};

// Serves a pre-generated synthetic dataset.
class SyntheticProvider : public VectorProvider {
 public:
  explicit SyntheticProvider(const SyntheticDataset& dataset) : dataset_(&dataset) {}

  std::vector<std::vector<FaceVector>> detect_and_embed(const Segment& segment) const override;
  std::vector<Candidate> propose_in_gaps(const std::vector<GapQuery>& queries) const override;
  std::int64_t frame_count() const override { return dataset_->stream.frame_count(); }

 private:
  const SyntheticDataset* dataset_;
};

}  // namespace facepix
