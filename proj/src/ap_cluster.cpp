#include "facepix/ap_cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "facepix/rng.hpp"

namespace facepix::ap {

namespace {

constexpr double kPreferenceFloor = -1.0 + 1e-3;  // keeps same-frame -1 strictly dominated
constexpr double kPreferenceCeiling = -1e-4;      // must stay strictly below perfect similarity
constexpr double kModeCut = -0.375;               // splits same-person from cross-person pairs
constexpr double kPreferenceScale = 0.8;          // p = -scale * sqrt(partners) * mode depth
constexpr double kPreferenceDepthCap = 8.0;       // beyond ~10x depth cold starts go singleton
constexpr double kPreferenceSpreadCap = 40.0;     // ... and beyond ~50x the mode's spread
constexpr double kJitter = 1e-9;                  // deterministic degeneracy breaking

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Frame groups of the current state; slot = -1 for frames with one member.
struct FrameGroups {
  std::vector<int> slot_of;   // per vector, -1 when its frame has a single member
  int slots = 0;
};

FrameGroups build_frame_groups(const MessageState& st) {
  FrameGroups g;
  const int m = st.dim();
  g.slot_of.assign(m, -1);
  std::map<std::int64_t, std::vector<int>> by_frame;
  for (int i = 0; i < m; ++i) by_frame[st.frame_of[i]].push_back(i);
  for (const auto& [frame, members] : by_frame) {
    if (members.size() < 2) continue;
    for (int i : members) g.slot_of[i] = g.slots;
    ++g.slots;
  }
  return g;
}

}  // namespace

double positioned_similarity(const FaceVector& a, const FaceVector& b) {
  if (a.frame_index == b.frame_index) return -1.0;
  return std::max(-1.0, dot(a.embedding, b.embedding) - 1.0);
}

void update_responsibilities(MessageState& st, double damping, bool parallel) {
  const int m = st.dim();
  const double* S = st.S.data();
  const double* A = st.A.data();
  double* R = st.R.data();
#pragma omp parallel for schedule(static) if (parallel && m > 64)
  for (int i = 0; i < m; ++i) {
    const std::size_t row = static_cast<std::size_t>(i) * m;
    double max1 = -std::numeric_limits<double>::infinity();
    double max2 = max1;
    int arg1 = -1;
    for (int k = 0; k < m; ++k) {
      const double v = A[row + k] + S[row + k];
      if (v > max1) {
        max2 = max1;
        max1 = v;
        arg1 = k;
      } else if (v > max2) {
        max2 = v;
      }
    }
    for (int k = 0; k < m; ++k) {
      const double competing = (k == arg1) ? max2 : max1;
      // single-vector state has no competitor; R falls back to S
      const double fresh =
          std::isinf(competing) ? S[row + k] : S[row + k] - competing;
      R[row + k] = damping * R[row + k] + (1.0 - damping) * fresh;
    }
  }
}

void update_availabilities(MessageState& st, double damping, bool parallel) {
  const int m = st.dim();
  const double* R = st.R.data();
  double* A = st.A.data();

  const FrameGroups groups = build_frame_groups(st);

  // colsum[k] = sum over all rows of max(0, R(.,k));
  // framesum[slot][k] = same restricted to one frame's members
  std::vector<double> colsum(m, 0.0);
  std::vector<double> framesum(static_cast<std::size_t>(groups.slots) * m, 0.0);
#pragma omp parallel for schedule(static) if (parallel && m > 64)
  for (int k = 0; k < m; ++k) {
    double total = 0.0;
    for (int i = 0; i < m; ++i) {
      const double pos = std::max(0.0, R[static_cast<std::size_t>(i) * m + k]);
      total += pos;
      const int slot = groups.slot_of[i];
      if (slot >= 0) framesum[static_cast<std::size_t>(slot) * m + k] += pos;
    }
    colsum[k] = total;
  }

#pragma omp parallel for schedule(static) if (parallel && m > 64)
  for (int i = 0; i < m; ++i) {
    const std::size_t row = static_cast<std::size_t>(i) * m;
    const int islot = groups.slot_of[i];
    for (int k = 0; k < m; ++k) {
      const double rkk = R[static_cast<std::size_t>(k) * m + k];
      double fresh;
      if (i == k) {
        fresh = colsum[k] - std::max(0.0, rkk);  // evidence from all others
      } else {
        const double own = std::max(0.0, R[row + k]);
        double support = colsum[k] - std::max(0.0, rkk) - own;
        if (islot >= 0) {
          // same-frame peers of i repel instead of support
          double peers = framesum[static_cast<std::size_t>(islot) * m + k] - own;
          if (st.frame_of[k] == st.frame_of[i]) peers -= std::max(0.0, rkk);
          support -= 2.0 * peers;
        }
        fresh = std::min(0.0, rkk + support);
      }
      A[row + k] = damping * A[row + k] + (1.0 - damping) * fresh;
    }
  }
}

std::vector<int> assign_exemplars(const MessageState& st) {
  const int m = st.dim();
  std::vector<int> exemplar(m, -1);
  for (int i = 0; i < m; ++i) {
    double best = -std::numeric_limits<double>::infinity();
    int arg = 0;
    for (int k = 0; k < m; ++k) {
      const double v = st.criterion(i, k);
      if (v > best) {
        best = v;
        arg = k;
      }
    }
    exemplar[i] = arg;
  }
  return exemplar;
}

int enforce_frame_exclusion(const MessageState& st, std::vector<int>& exemplar) {
  const int m = st.dim();
  std::map<std::int64_t, std::vector<int>> by_frame;
  for (int i = 0; i < m; ++i) by_frame[st.frame_of[i]].push_back(i);

  int fixes = 0;
  for (const auto& [frame, members] : by_frame) {
    if (members.size() < 2) continue;
    std::map<int, std::vector<int>> by_exemplar;
    for (int v : members) by_exemplar[exemplar[v]].push_back(v);
    for (auto& [ex, sharers] : by_exemplar) {
      if (sharers.size() < 2) continue;
      std::sort(sharers.begin(), sharers.end(), [&](int a, int b) {
        const double ca = st.criterion(a, ex), cb = st.criterion(b, ex);
        if (ca != cb) return ca > cb;
        return a < b;
      });
      // best claimant keeps the exemplar, the rest re-choose
      for (std::size_t s = 1; s < sharers.size(); ++s) {
        const int v = sharers[s];
        std::vector<char> forbidden(m, false);
        for (int u : members)
          if (u != v && exemplar[u] >= 0) forbidden[exemplar[u]] = true;
        double best = -std::numeric_limits<double>::infinity();
        int arg = v;
        for (int k = 0; k < m; ++k) {
          if (forbidden[k]) continue;
          const double c = st.criterion(v, k);
          if (c > best) {
            best = c;
            arg = k;
          }
        }
        exemplar[v] = arg;
        ++fixes;
      }
    }
  }
  return fixes;
}

IncrementalClusterer::IncrementalClusterer(Params params) : params_(params) {
  if (params_.damping < 0.0 || params_.damping >= 1.0)
    throw std::invalid_argument("damping must be in [0,1)");
  if (params_.stable_iters < 1 || params_.max_iters < params_.stable_iters)
    throw std::invalid_argument("need max_iters >= stable_iters >= 1");
}

void IncrementalClusterer::evict_older_than(int segment_index) {
  if (params_.eviction_segments <= 0) return;
  const int cutoff = segment_index - params_.eviction_segments;
  const int m = state_.dim();
  std::vector<int> keep;
  keep.reserve(m);
  for (int i = 0; i < m; ++i)
    if (state_.segment_of[i] > cutoff) keep.push_back(i);
  if (static_cast<int>(keep.size()) == m) return;

  const int n = static_cast<int>(keep.size());
  MessageState next;
  next.S.resize(static_cast<std::size_t>(n) * n);
  next.R.resize(static_cast<std::size_t>(n) * n);
  next.A.resize(static_cast<std::size_t>(n) * n);
  next.preference = state_.preference;
  next.next_gid = state_.next_gid;
  std::vector<int> person(n);
  for (int a = 0; a < n; ++a) {
    const int i = keep[a];
    next.frame_of.push_back(state_.frame_of[i]);
    next.segment_of.push_back(state_.segment_of[i]);
    next.gid.push_back(state_.gid[i]);
    next.embedding.push_back(std::move(state_.embedding[i]));
    person[a] = active_person_[i];
    for (int b = 0; b < n; ++b) {
      const int k = keep[b];
      next.S[static_cast<std::size_t>(a) * n + b] = state_.s(i, k);
      next.R[static_cast<std::size_t>(a) * n + b] = state_.r(i, k);
      next.A[static_cast<std::size_t>(a) * n + b] = state_.a(i, k);
    }
  }
  state_ = std::move(next);
  active_person_ = std::move(person);
}

void warm_start(MessageState& st, const std::vector<FaceVector>& vectors, int segment_index,
                bool parallel) {
  const int old_dim = st.dim();
  const int p = static_cast<int>(vectors.size());
  if (p == 0) return;
  const int n = old_dim + p;

  std::vector<std::int64_t> gids(p);
  for (int j = 0; j < p; ++j) gids[j] = st.next_gid++;

  MessageState next;
  next.S.assign(static_cast<std::size_t>(n) * n, 0.0);
  next.R.assign(static_cast<std::size_t>(n) * n, 0.0);
  next.A.assign(static_cast<std::size_t>(n) * n, 0.0);
  next.frame_of = st.frame_of;
  next.segment_of = st.segment_of;
  next.gid = st.gid;
  next.embedding = st.embedding;
  next.preference = st.preference;
  next.next_gid = st.next_gid;
  for (int j = 0; j < p; ++j) {
    next.frame_of.push_back(vectors[j].frame_index);
    next.segment_of.push_back(segment_index);
    next.gid.push_back(gids[j]);
    next.embedding.push_back(vectors[j].embedding);
  }

  for (int i = 0; i < old_dim; ++i)
    std::copy_n(st.S.data() + static_cast<std::size_t>(i) * old_dim, old_dim,
                next.S.data() + static_cast<std::size_t>(i) * n);

  auto similarity = [&](int i, int k) {
    if (next.frame_of[i] == next.frame_of[k]) return -1.0;
    const double base = std::max(-1.0, dot(next.embedding[i], next.embedding[k]) - 1.0);
    return std::max(-1.0, base - kJitter * hash_unit(static_cast<std::uint64_t>(next.gid[i]),
                                                     static_cast<std::uint64_t>(next.gid[k])));
  };

  const bool par = parallel && p * n > 4096;
#pragma omp parallel for schedule(static) if (par)
  for (int j = 0; j < p; ++j) {
    const int row = old_dim + j;
    for (int k = 0; k < old_dim; ++k) {
      next.S[static_cast<std::size_t>(row) * n + k] = similarity(row, k);
      next.S[static_cast<std::size_t>(k) * n + row] = similarity(k, row);
    }
    for (int j2 = 0; j2 < p; ++j2)
      if (j2 != j)
        next.S[static_cast<std::size_t>(row) * n + old_dim + j2] = similarity(row, old_dim + j2);
  }

  // nearest prior neighbour per new vector; messages are copied from it
  if (old_dim > 0) {
    std::vector<int> nearest(p, 0);
    for (int j = 0; j < p; ++j) {
      const int row = old_dim + j;
      double best = -std::numeric_limits<double>::infinity();
      int arg = 0;
      for (int k = 0; k < old_dim; ++k) {
        const double s = next.S[static_cast<std::size_t>(row) * n + k];
        if (s > best) {
          best = s;
          arg = k;
        }
      }
      nearest[j] = arg;
    }
    for (int i = 0; i < old_dim; ++i) {
      std::copy_n(st.R.data() + static_cast<std::size_t>(i) * old_dim, old_dim,
                  next.R.data() + static_cast<std::size_t>(i) * n);
      std::copy_n(st.A.data() + static_cast<std::size_t>(i) * old_dim, old_dim,
                  next.A.data() + static_cast<std::size_t>(i) * n);
      for (int j = 0; j < p; ++j) {
        next.R[static_cast<std::size_t>(i) * n + old_dim + j] = st.r(i, nearest[j]);
        next.A[static_cast<std::size_t>(i) * n + old_dim + j] = st.a(i, nearest[j]);
      }
    }
    for (int j = 0; j < p; ++j) {
      const int row = old_dim + j;
      std::copy_n(st.R.data() + static_cast<std::size_t>(nearest[j]) * old_dim, old_dim,
                  next.R.data() + static_cast<std::size_t>(row) * n);
      std::copy_n(st.A.data() + static_cast<std::size_t>(nearest[j]) * old_dim, old_dim,
                  next.A.data() + static_cast<std::size_t>(row) * n);
      // new-new block stays zero
    }
  }

  st = std::move(next);
}

// The cos-1 similarities are bimodal: same-person pairs sit near 0, pairs
// across identities near -1. Electing one exemplar per identity needs a
// preference tied to the upper mode's depth d, its spread s, and the typical
// same-person partner count n: a size-n cluster splits once the
// exemplar-selection gain (~ sqrt(n)*d) outweighs |p|, while cold starts
// collapse into singletons once |p| passes ~10x d or ~50x s (high embedding
// dimensions concentrate the mode, shrinking s against d). The canonical AP
// median lands inside the lower mode and the messages settle on all-singleton
// states instead.
void IncrementalClusterer::refresh_preference() {
  const int m = state_.dim();
  if (m == 0) return;

  std::size_t off_pairs = 0, upper_pairs = 0;
  double upper_sum = 0.0, upper_sum2 = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < m; ++k) {
      if (i == k) continue;
      ++off_pairs;
      const double s = state_.s(i, k);
      if (s > kModeCut) {
        ++upper_pairs;
        upper_sum += s;
        upper_sum2 += s * s;
      }
    }
  }

  double p = kPreferenceCeiling;  // no same-person mass: every vector stands alone
  if (upper_pairs > 0) {
    const double mean = upper_sum / static_cast<double>(upper_pairs);
    const double depth = std::max(-mean, 1e-6);
    const double spread =
        std::sqrt(std::max(0.0, upper_sum2 / static_cast<double>(upper_pairs) - mean * mean));
    const double partners =
        std::max(1.0, static_cast<double>(m - 1) * static_cast<double>(upper_pairs) /
                          static_cast<double>(off_pairs));
    const double target = kPreferenceScale * std::sqrt(partners) * depth;
    p = -std::min({target, kPreferenceDepthCap * depth,
                   std::max(kPreferenceSpreadCap * spread, 2.0 * depth)});
  }
  state_.preference = std::clamp(p, kPreferenceFloor, kPreferenceCeiling);
  for (int k = 0; k < m; ++k)
    state_.s(k, k) = state_.preference -
                     kJitter * hash_unit(static_cast<std::uint64_t>(state_.gid[k]),
                                         static_cast<std::uint64_t>(state_.gid[k]));
}

std::vector<int> IncrementalClusterer::persist_person_ids(const std::vector<int>& exemplar) {
  const int m = state_.dim();
  std::map<int, std::vector<int>> clusters;  // exemplar -> members, exemplar order is deterministic
  for (int i = 0; i < m; ++i) clusters[exemplar[i]].push_back(i);

  struct Claim {
    int count;
    int exemplar;
    int person;
  };
  std::vector<Claim> claims;
  for (const auto& [ex, members] : clusters) {
    std::map<int, int> votes;
    for (int i : members)
      if (active_person_[i] >= 0) ++votes[active_person_[i]];
    for (const auto& [person, count] : votes) claims.push_back(Claim{count, ex, person});
  }
  std::sort(claims.begin(), claims.end(), [](const Claim& a, const Claim& b) {
    if (a.count != b.count) return a.count > b.count;
    if (a.exemplar != b.exemplar) return a.exemplar < b.exemplar;
    return a.person < b.person;
  });

  std::map<int, int> person_of_cluster;
  std::vector<char> person_claimed;
  auto claimed = [&](int person) {
    return person < static_cast<int>(person_claimed.size()) && person_claimed[person];
  };
  for (const Claim& c : claims) {
    if (person_of_cluster.count(c.exemplar) || claimed(c.person)) continue;
    person_of_cluster[c.exemplar] = c.person;
    if (c.person >= static_cast<int>(person_claimed.size())) person_claimed.resize(c.person + 1, false);
    person_claimed[c.person] = true;
  }
  for (const auto& [ex, members] : clusters) {
    if (!person_of_cluster.count(ex)) person_of_cluster[ex] = next_person_++;
  }

  std::vector<int> person(m);
  for (const auto& [ex, members] : clusters)
    for (int i : members) person[i] = person_of_cluster[ex];
  return person;
}

SegmentResult IncrementalClusterer::cluster_segment(const std::vector<FaceVector>& vectors,
                                                    int segment_index) {
  SegmentResult result;
  if (vectors.empty()) {  // empty segment leaves the state untouched
    result.active_vectors = state_.dim();
    return result;
  }
  evict_older_than(segment_index);
  warm_start(state_, vectors, segment_index, params_.parallel);
  active_person_.resize(state_.dim(), -1);
  refresh_preference();

  const int m = state_.dim();
  result.active_vectors = m;
  if (m == 0) return result;

  std::vector<int> prev = assign_exemplars(state_);
  std::vector<int> exemplar = prev;
  int stable = 0;
  int it = 0;
  for (it = 1; it <= params_.max_iters; ++it) {
    update_responsibilities(state_, params_.damping, params_.parallel);
    update_availabilities(state_, params_.damping, params_.parallel);
    exemplar = assign_exemplars(state_);
    stable = (exemplar == prev) ? stable + 1 : 0;
    prev = exemplar;
    if (stable >= params_.stable_iters) break;
  }
  result.iterations = std::min(it, params_.max_iters);
  result.converged = stable >= params_.stable_iters;
  total_iterations_ += result.iterations;

  result.exclusion_fixes = enforce_frame_exclusion(state_, exemplar);
  const std::vector<int> person = persist_person_ids(exemplar);
  active_person_ = person;
  for (int i = 0; i < m; ++i) labels_[state_.gid[i]] = person[i];

  // per-segment support of each cluster, over this segment's vectors only
  std::map<int, int> support;
  const int p = static_cast<int>(vectors.size());
  const int first_new = m - p;
  for (int j = 0; j < p; ++j) ++support[person[first_new + j]];

  result.labels.resize(p);
  result.withheld.resize(p);
  for (int j = 0; j < p; ++j) {
    result.labels[j] = person[first_new + j];
    result.withheld[j] = support[person[first_new + j]] < params_.min_cluster_support;
  }
  return result;
}

}  // namespace facepix::ap
