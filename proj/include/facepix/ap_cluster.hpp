#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "facepix/types.hpp"

namespace facepix::ap {

struct Params {
  double damping = 0.5;
  int max_iters = 200;
  int stable_iters = 10;         // exemplars unchanged this many iterations => converged
  int eviction_segments = 10;    // vectors older than this many segments are frozen out
  int min_cluster_support = 3;   // per-segment detections needed before a cluster is emitted
  bool parallel = true;
};

// Growing message-passing state over every face vector still in play.
// S holds pairwise similarities in [-1,0] (exactly -1 for same-frame pairs),
// R/A the responsibility and availability messages.
struct MessageState {
  std::vector<double> S, R, A;                 // row-major dim x dim
  std::vector<std::int64_t> frame_of;          // frame index per vector
  std::vector<int> segment_of;                 // arrival segment per vector
  std::vector<std::int64_t> gid;               // stable global id per vector
  std::vector<std::vector<double>> embedding;  // unit vectors, per vector
  double preference = 0.0;
  std::int64_t next_gid = 0;  // total vectors ever admitted

  int dim() const { return static_cast<int>(frame_of.size()); }
  double& s(int i, int k) { return S[static_cast<std::size_t>(i) * dim() + k]; }
  double& r(int i, int k) { return R[static_cast<std::size_t>(i) * dim() + k]; }
  double& a(int i, int k) { return A[static_cast<std::size_t>(i) * dim() + k]; }
  double s(int i, int k) const { return S[static_cast<std::size_t>(i) * dim() + k]; }
  double r(int i, int k) const { return R[static_cast<std::size_t>(i) * dim() + k]; }
  double a(int i, int k) const { return A[static_cast<std::size_t>(i) * dim() + k]; }
  double criterion(int i, int k) const { return r(i, k) + a(i, k); }
};

// cos(a,b) - 1 clamped to [-1,0] across frames; exactly -1 for two vectors
// of the same frame (one face cannot be in two places at once).
double positioned_similarity(const FaceVector& a, const FaceVector& b);

// One damped message pass over the previous iterate. Row-parallel.
void update_responsibilities(MessageState& st, double damping, bool parallel);
void update_availabilities(MessageState& st, double damping, bool parallel);

// Row-wise argmax of R+A; ties go to the lowest index.
std::vector<int> assign_exemplars(const MessageState& st);

// Deterministic backstop for degenerate ties: no two vectors of one frame
// may share an exemplar. Returns the number of reassignments performed.
int enforce_frame_exclusion(const MessageState& st, std::vector<int>& exemplar);

// Grows the state by one segment's vectors: old message blocks are kept
// verbatim, each new vector's rows/columns start as a copy of its nearest
// prior neighbour's (by similarity), and the new-new block starts at zero.
// On an empty state this is the all-zero initialization.
void warm_start(MessageState& st, const std::vector<FaceVector>& vectors, int segment_index,
                bool parallel = true);

struct SegmentResult {
  std::vector<int> labels;      // person id per input vector of this segment
  std::vector<bool> withheld;   // support below min_cluster_support this segment
  bool converged = true;
  int iterations = 0;
  int exclusion_fixes = 0;
  int active_vectors = 0;       // matrix dimension after this segment
};

// Incremental clusterer: one instance per stream. Feeding a segment grows
// the matrices, warm-starts the new rows/columns from each vector's nearest
// prior neighbour, and iterates messages to convergence.
class IncrementalClusterer {
 public:
  explicit IncrementalClusterer(Params params);

  SegmentResult cluster_segment(const std::vector<FaceVector>& vectors, int segment_index);

  const MessageState& state() const { return state_; }
  // Final label per global vector id, frozen labels included.
  const std::unordered_map<std::int64_t, int>& labels_by_gid() const { return labels_; }
  std::int64_t vectors_seen() const { return state_.next_gid; }
  int person_count() const { return next_person_; }
  long long message_iterations() const { return total_iterations_; }

 private:
  void evict_older_than(int segment_index);
  void refresh_preference();
  std::vector<int> persist_person_ids(const std::vector<int>& exemplar);

  Params params_;
  MessageState state_;
  std::unordered_map<std::int64_t, int> labels_;      // gid -> person id (all time)
  std::vector<int> active_person_;                    // person id per active vector (-1 unknown)
  int next_person_ = 0;
  long long total_iterations_ = 0;
};

// Naive direct-formula serial kernels, kept as the reference the optimized
// passes are tested against.
namespace reference {
void update_responsibilities(MessageState& st, double damping);
void update_availabilities(MessageState& st, double damping);
}  // namespace reference

}  // namespace facepix::ap
