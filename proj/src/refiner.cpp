#include "facepix/refiner.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <map>

#include "facepix/hungarian.hpp"
#include "facepix/trajectory.hpp"

namespace facepix {

std::vector<CandidateChain> associate_candidates(const std::vector<Candidate>& candidates,
                                                 double iou_floor) {
  std::map<std::int64_t, std::vector<Candidate>> by_frame;
  for (const Candidate& c : candidates) by_frame[c.frame_index].push_back(c);

  std::vector<CandidateChain> chains;
  std::vector<int> open;  // indices of chains whose tail is on the previous processed frame
  std::int64_t prev_frame = -1;

  for (auto& [frame, frame_cands] : by_frame) {
    if (frame != prev_frame + 1) open.clear();  // chains only grow over consecutive frames
    prev_frame = frame;

    std::vector<int> next_open;
    if (!open.empty() && !frame_cands.empty()) {
      std::vector<BBox> tails(open.size());
      for (std::size_t i = 0; i < open.size(); ++i) tails[i] = chains[open[i]].items.back().bbox;
      std::vector<BBox> heads(frame_cands.size());
      for (std::size_t j = 0; j < frame_cands.size(); ++j) heads[j] = frame_cands[j].bbox;

      const BoxMatch match = match_boxes(tails, heads, iou_floor);
      std::vector<char> used(frame_cands.size(), false);
      for (const auto& [ti, hj] : match.pairs) {
        chains[open[ti]].items.push_back(frame_cands[hj]);
        next_open.push_back(open[ti]);
        used[hj] = true;
      }
      for (std::size_t j = 0; j < frame_cands.size(); ++j) {
        if (used[j]) continue;
        chains.push_back(CandidateChain{{frame_cands[j]}});
        next_open.push_back(static_cast<int>(chains.size()) - 1);
      }
    } else {
      for (const Candidate& c : frame_cands) {
        chains.push_back(CandidateChain{{c}});
        next_open.push_back(static_cast<int>(chains.size()) - 1);
      }
    }
    std::sort(next_open.begin(), next_open.end());
    open = std::move(next_open);
  }
  return chains;
}

ELRResult test_candidate_chain(const Trajectory& trajectory, const CandidateChain& chain,
                               double threshold) {
  // detected entries only: these carry the detector-side feature rows
  std::vector<std::pair<std::int64_t, const std::vector<double>*>> detected;
  for (const auto& [frame, entry] : trajectory.entries)
    if (entry.status == EntryStatus::detected && !entry.feat32.empty())
      detected.emplace_back(frame, &entry.feat32);

  const std::size_t m_prime = chain.items.size();
  ELRResult res;
  res.threshold = threshold;
  if (m_prime < 2 || detected.size() < m_prime) {
    res.t_elr = std::numeric_limits<double>::infinity();
    res.decision = TestDecision::reject;
    res.reason = "too_short";
    return res;
  }

  // the m' trajectory rows nearest in time to the chain
  std::vector<std::pair<std::int64_t, std::size_t>> ranked(detected.size());
  for (std::size_t i = 0; i < detected.size(); ++i) {
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    for (const Candidate& c : chain.items) {
      const std::int64_t d = detected[i].first - c.frame_index;
      best = std::min(best, d < 0 ? -d : d);
    }
    ranked[i] = {best, i};
  }
  std::sort(ranked.begin(), ranked.end(), [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return detected[a.second].first < detected[b.second].first;
  });
  std::vector<std::size_t> chosen(m_prime);
  for (std::size_t i = 0; i < m_prime; ++i) chosen[i] = ranked[i].second;
  std::sort(chosen.begin(), chosen.end(), [&](std::size_t a, std::size_t b) {
    return detected[a].first < detected[b].first;
  });

  std::vector<std::vector<double>> x(m_prime), y(m_prime);
  for (std::size_t i = 0; i < m_prime; ++i) {
    x[i] = *detected[chosen[i]].second;
    y[i] = chain.items[i].feat32;
  }
  return elr_two_sample_test(x, y, threshold);
}

RefineOutcome refine_trajectory(Trajectory& trajectory, const std::vector<Candidate>& gap_candidates,
                                const RefinerParams& params, int max_break) {
  RefineOutcome outcome;
  if (gap_candidates.empty()) return outcome;

  std::vector<CandidateChain> chains = associate_candidates(gap_candidates, params.hungarian_iou_floor);
  outcome.chains_formed = static_cast<int>(chains.size());

  std::size_t detected_count = 0;
  for (const auto& [frame, entry] : trajectory.entries)
    if (entry.status == EntryStatus::detected) ++detected_count;

  struct Verdict {
    const CandidateChain* chain;
    ELRResult result;
  };
  std::vector<Verdict> accepted;
  for (const CandidateChain& chain : chains) {
    if (chain.items.size() < static_cast<std::size_t>(params.min_candidate_len)) {
      ++outcome.too_short;
      continue;
    }
    if (chain.items.size() >= detected_count) {  // candidate outgrowing the raw trajectory
      ++outcome.rejected;
      continue;
    }
    ELRResult res = test_candidate_chain(trajectory, chain, params.elr_threshold);
    if (res.decision == TestDecision::accept) {
      accepted.push_back(Verdict{&chain, std::move(res)});
    } else if (res.reason == "too_short") {
      ++outcome.too_short;
    } else {
      ++outcome.rejected;
    }
  }
  outcome.accepted = static_cast<int>(accepted.size());

  // longest chains commit first; later chains skip frames already claimed
  std::sort(accepted.begin(), accepted.end(), [](const Verdict& a, const Verdict& b) {
    if (a.chain->items.size() != b.chain->items.size())
      return a.chain->items.size() > b.chain->items.size();
    return a.chain->first_frame() < b.chain->first_frame();
  });
  for (const Verdict& v : accepted) {
    for (const Candidate& c : v.chain->items) {
      if (trajectory.entries.count(c.frame_index)) continue;  // detected entries win
      trajectory.entries.emplace(c.frame_index,
                                 TrajectoryEntry{c.bbox, EntryStatus::refined, c.feat32});
      ++outcome.filled_frames;
    }
  }
  interpolate_breaks(trajectory, max_break);
  return outcome;
}

}  // namespace facepix
