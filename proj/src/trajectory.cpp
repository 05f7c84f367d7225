#include "facepix/trajectory.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace facepix {

namespace {

Trajectory* find_person(std::vector<Trajectory>& trajectories, int person_id) {
  for (auto& t : trajectories)
    if (t.person_id == person_id) return &t;
  return nullptr;
}

}  // namespace

void append_detections(std::vector<Trajectory>& trajectories, const std::vector<FaceVector>& vectors,
                       const std::vector<int>& labels) {
  if (vectors.size() != labels.size())
    throw std::invalid_argument("labels/vectors size mismatch");
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    const int person = labels[i];
    if (person < 0) continue;
    Trajectory* traj = find_person(trajectories, person);
    if (traj == nullptr) {
      trajectories.push_back(Trajectory{person, false, {}});
      traj = &trajectories.back();
    }
    const auto [it, inserted] = traj->entries.emplace(
        vectors[i].frame_index,
        TrajectoryEntry{vectors[i].bbox, EntryStatus::detected, vectors[i].feat32});
    if (!inserted)
      throw std::logic_error("two same-frame detections mapped to person " + std::to_string(person) +
                             " at frame " + std::to_string(vectors[i].frame_index) +
                             " (frame-exclusion violated upstream)");
  }
  std::sort(trajectories.begin(), trajectories.end(),
            [](const Trajectory& a, const Trajectory& b) { return a.person_id < b.person_id; });
}

std::vector<Trajectory> build_raw(const std::vector<FaceVector>& vectors,
                                  const std::vector<int>& labels) {
  std::vector<Trajectory> out;
  append_detections(out, vectors, labels);
  return out;
}

void interpolate_breaks(Trajectory& trajectory, int max_break) {
  if (max_break < 0) throw std::invalid_argument("max_break must be >= 0");
  if (trajectory.entries.size() < 2 || max_break == 0) return;

  std::vector<std::pair<std::int64_t, TrajectoryEntry>> fills;
  auto it = trajectory.entries.begin();
  auto prev = it++;
  for (; it != trajectory.entries.end(); prev = it++) {
    const std::int64_t run = it->first - prev->first - 1;
    if (run < 1 || run > max_break) continue;
    const BBox& a = prev->second.box;
    const BBox& b = it->second.box;
    for (std::int64_t f = prev->first + 1; f < it->first; ++f) {
      const double t = static_cast<double>(f - prev->first) / static_cast<double>(it->first - prev->first);
      BBox box{a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t, a.w + (b.w - a.w) * t,
               a.h + (b.h - a.h) * t};
      fills.emplace_back(f, TrajectoryEntry{box, EntryStatus::interpolated, {}});
    }
  }
  for (auto& [frame, entry] : fills) trajectory.entries.emplace(frame, std::move(entry));
}

std::vector<Gap> find_gaps(const Trajectory& trajectory, std::int64_t w0, std::int64_t w1) {
  std::vector<Gap> gaps;
  if (trajectory.entries.empty() || w0 >= w1) return gaps;

  auto known_before = [&](std::int64_t f) -> std::optional<std::int64_t> {
    auto it = trajectory.entries.lower_bound(f);
    if (it == trajectory.entries.begin()) return std::nullopt;
    return std::prev(it)->first;
  };
  auto known_after = [&](std::int64_t f) -> std::optional<std::int64_t> {
    auto it = trajectory.entries.upper_bound(f);
    if (it == trajectory.entries.end()) return std::nullopt;
    return it->first;
  };

  std::int64_t f = w0;
  while (f < w1) {
    if (trajectory.entries.count(f)) {
      ++f;
      continue;
    }
    std::int64_t end = f;
    while (end + 1 < w1 && !trajectory.entries.count(end + 1)) ++end;
    Gap g;
    g.first = f;
    g.last = end;
    g.left_flank = known_before(f);
    g.right_flank = known_after(end);
    // a run with nothing observed after it cannot be vouched for yet
    if (g.right_flank.has_value()) gaps.push_back(g);
    f = end + 1;
  }
  return gaps;
}

std::vector<GapQuery> gap_regions(const Trajectory& trajectory, const std::vector<Gap>& gaps,
                                  double dilation) {
  std::vector<GapQuery> queries;
  for (const Gap& g : gaps) {
    BBox base;
    if (g.left_flank && g.right_flank) {
      base = union_box(trajectory.entries.at(*g.left_flank).box,
                       trajectory.entries.at(*g.right_flank).box);
    } else if (g.left_flank) {
      base = trajectory.entries.at(*g.left_flank).box;
    } else if (g.right_flank) {
      base = trajectory.entries.at(*g.right_flank).box;
    } else {
      continue;  // nothing known on either side
    }
    const BBox region = dilate(base, dilation);
    for (std::int64_t f = g.first; f <= g.last; ++f) queries.push_back(GapQuery{f, region});
  }
  return queries;
}

}  // namespace facepix
