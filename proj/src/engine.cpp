#include "facepix/engine.hpp"

#include <chrono>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>

#include "facepix/elr.hpp"
#include "facepix/nms.hpp"
#include "facepix/trajectory.hpp"

namespace facepix {

double EngineConfig::elr_threshold() const {
  if (elr_threshold_override) return *elr_threshold_override;
  return chi2_quantile_df1(elr_confidence);
}

EngineConfig EngineConfig::from(const Config& cfg) {
  EngineConfig e;
  e.segment_frames = cfg.get("segment_frames", 150);
  e.fps = cfg.get("fps", 30);
  e.embedding_dim = cfg.get("embedding_dim", 512);

  e.cluster.damping = cfg.get("damping", 0.5);
  e.cluster.max_iters = cfg.get("max_iters", 200);
  e.cluster.stable_iters = cfg.get("stable_iters", 10);
  e.cluster.eviction_segments = cfg.get("eviction_segments", 10);
  e.cluster.min_cluster_support = cfg.get("min_cluster_support", 3);

  e.max_break = cfg.get("max_break", 5);
  e.gap_dilation = cfg.get("gap_dilation", 1.5);
  e.nms_iou = cfg.get("nms_iou", 0.7);

  e.elr_confidence = cfg.get("elr_confidence", 0.95);
  e.elr_threshold_override = cfg.get_optional("elr_threshold_override");
  e.hungarian_iou_floor = cfg.get("hungarian_iou_floor", 0.1);
  e.min_candidate_len = cfg.get("min_candidate_len", 2);
  e.refine = cfg.get_flag("refine", true);

  e.blur_sigma_mode = cfg.get("blur_sigma_mode", std::string("auto"));
  e.blur_sigma = cfg.get("blur_sigma", 8.0);

  if (cfg.has("streamer_bbox")) {
    std::istringstream in(cfg.get("streamer_bbox", std::string()));
    std::string tok;
    std::vector<double> v;
    while (std::getline(in, tok, ',')) v.push_back(std::stod(tok));
    if (v.size() != 4) throw std::runtime_error("streamer_bbox needs x,y,w,h");
    e.streamer_bbox = BBox{v[0], v[1], v[2], v[3]};
  }
  e.streamer_frame = cfg.get("streamer_frame", static_cast<std::int64_t>(0));

  e.nonconvergence_budget = cfg.get("nonconvergence_budget", 3);
  e.segment_cost = cfg.get_optional("segment_cost");
  e.parallel = cfg.get_flag("parallel", true);
  e.cluster.parallel = e.parallel;
  return e;
}

namespace {

Trajectory* person_trajectory(std::vector<Trajectory>& trajectories, int person) {
  for (auto& t : trajectories)
    if (t.person_id == person) return &t;
  return nullptr;
}

}  // namespace

RunResult run_pipeline(const FrameStream& input, const VectorProvider& provider,
                       const EngineConfig& cfg) {
  if (provider.frame_count() < input.frame_count())
    throw std::runtime_error("provider covers " + std::to_string(provider.frame_count()) +
                             " frames but the stream has " + std::to_string(input.frame_count()));

  RunResult result;
  result.output = input;  // pixelation happens in place on the copy

  RunLog& log = result.log;
  const auto segments = segmentize(input.frame_count(), cfg.segment_frames);

  ap::IncrementalClusterer clusterer(cfg.cluster);
  std::vector<Trajectory>& trajectories = result.trajectories;

  RefinerParams refiner;
  refiner.elr_threshold = cfg.elr_threshold();
  refiner.hungarian_iou_floor = cfg.hungarian_iou_floor;
  refiner.min_candidate_len = cfg.min_candidate_len;
  refiner.nms_iou = cfg.nms_iou;

  RenderParams render;
  render.sigma_mode = cfg.blur_sigma_mode;
  render.sigma = cfg.blur_sigma;
  render.parallel = cfg.parallel;

  bool streamer_resolved = false;

  for (const Segment& seg : segments) {
    const auto t0 = std::chrono::steady_clock::now();
    SegmentLogEntry entry;
    entry.segment = seg.index;
    entry.first_frame = seg.first_frame;
    entry.frame_count = seg.frame_count;

    // detect + embed
    const auto faces_by_frame = provider.detect_and_embed(seg);
    std::vector<FaceVector> vectors;
    for (const auto& frame_faces : faces_by_frame)
      vectors.insert(vectors.end(), frame_faces.begin(), frame_faces.end());
    entry.faces = static_cast<int>(vectors.size());

    // cluster into persistent person ids
    const ap::SegmentResult clustered = clusterer.cluster_segment(vectors, seg.index);
    entry.iterations = clustered.iterations;
    entry.converged = clustered.converged;
    entry.exclusion_fixes = clustered.exclusion_fixes;
    entry.active_vectors = clustered.active_vectors;
    if (!clustered.converged) ++log.nonconverged_segments;
    if (log.nonconverged_segments > cfg.nonconvergence_budget)
      throw std::runtime_error("clustering failed to converge in more than " +
                               std::to_string(cfg.nonconvergence_budget) + " segments");

    std::vector<int> emit_labels(vectors.size(), -1);
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      if (clustered.withheld[i])
        ++entry.withheld;
      else
        emit_labels[i] = clustered.labels[i];
    }
    append_detections(trajectories, vectors, emit_labels);

    // close small breaks before looking for gaps
    for (Trajectory& t : trajectories) interpolate_breaks(t, cfg.max_break);

    if (cfg.refine) {
      for (Trajectory& t : trajectories) {
        const auto gaps = find_gaps(t, seg.first_frame, seg.end_frame());
        if (gaps.empty()) continue;
        const auto queries = gap_regions(t, gaps, cfg.gap_dilation);
        const auto raw_candidates = provider.propose_in_gaps(queries);
        if (raw_candidates.empty()) continue;

        std::map<std::int64_t, std::vector<Candidate>> by_frame;
        for (const Candidate& c : raw_candidates) by_frame[c.frame_index].push_back(c);
        std::vector<Candidate> kept;
        for (auto& [frame, cands] : by_frame) {
          auto survivors = nms(cands, cfg.nms_iou);
          kept.insert(kept.end(), survivors.begin(), survivors.end());
        }

        const RefineOutcome outcome = refine_trajectory(t, kept, refiner, cfg.max_break);
        entry.chains += outcome.chains_formed;
        entry.accepted += outcome.accepted;
        entry.rejected += outcome.rejected + outcome.too_short;
        entry.refined_frames += outcome.filled_frames;
      }
      for (Trajectory& t : trajectories) interpolate_breaks(t, cfg.max_break);
    }

    // streamer designation becomes possible once its frame has been processed
    if (!streamer_resolved && cfg.streamer_bbox && seg.contains(cfg.streamer_frame)) {
      log.streamer_person =
          designate_streamer(trajectories, cfg.streamer_frame, *cfg.streamer_bbox);
      streamer_resolved = true;
      if (log.streamer_person) {
        if (Trajectory* t = person_trajectory(trajectories, *log.streamer_person))
          t->is_streamer = true;
      } else {
        log.warnings.push_back("no trajectory overlaps the streamer designation; pixelating everyone");
      }
    }

    // blur and emit this segment
    auto boxes = render_frames(result.output, trajectories, seg.first_frame, seg.end_frame(), render);
    for (const OutputBox& b : boxes) {
      const ScheduleEntry sched = broadcast_schedule(b.frame, cfg.segment_frames, cfg.fps);
      if (sched.broadcast_frame_number - b.frame != 2 * static_cast<std::int64_t>(cfg.segment_frames))
        ++log.lag_violations;
    }
    result.boxes.insert(result.boxes.end(), boxes.begin(), boxes.end());

    const auto t1 = std::chrono::steady_clock::now();
    entry.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    log.segments.push_back(entry);
  }

  if (cfg.streamer_bbox && !streamer_resolved)
    log.warnings.push_back("streamer_frame lies outside the stream; designation skipped");

  const double budget = static_cast<double>(cfg.segment_frames) / cfg.fps;
  log.modeled_segment_cost = cfg.segment_cost.value_or(budget);
  log.continuity =
      simulate_continuity(input.frame_count(), cfg.segment_frames, cfg.fps, log.modeled_segment_cost);

  if (log.lag_violations > 0)
    throw std::logic_error("broadcast lag deviated from 2N on " +
                           std::to_string(log.lag_violations) + " frames");
  return result;
}

std::string RunLog::to_text(int segment_frames, int fps) const {
  std::ostringstream out;
  out << "segment_frames=" << segment_frames << '\n';
  out << "fps=" << fps << '\n';
  out << "broadcast_lag_frames=" << 2 * segment_frames << '\n';
  out << "lag_violations=" << lag_violations << '\n';
  out << "modeled_segment_cost_s=" << modeled_segment_cost << '\n';
  out << "continuity=" << (continuity.continuous ? "continuous" : "stalled") << '\n';
  if (!continuity.continuous) {
    out << "first_stall_frame=" << continuity.first_stall_frame << '\n';
    out << "first_stall_segment=" << continuity.first_stall_segment << '\n';
    out << "lateness_s=" << continuity.lateness_seconds << '\n';
  }
  out << "streamer_person=" << (streamer_person ? std::to_string(*streamer_person) : "none") << '\n';
  out << "nonconverged_segments=" << nonconverged_segments << '\n';
  for (const std::string& w : warnings) out << "warning=" << w << '\n';
  out << "# segment,first_frame,frames,faces,withheld,iterations,converged,exclusion_fixes,"
         "active_vectors,chains,accepted,rejected,refined_frames,wall_ms\n";
  for (const SegmentLogEntry& s : segments) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f", s.wall_ms);
    out << s.segment << ',' << s.first_frame << ',' << s.frame_count << ',' << s.faces << ','
        << s.withheld << ',' << s.iterations << ',' << (s.converged ? 1 : 0) << ','
        << s.exclusion_fixes << ',' << s.active_vectors << ',' << s.chains << ',' << s.accepted
        << ',' << s.rejected << ',' << s.refined_frames << ',' << buf << '\n';
  }
  return out.str();
}

}  // namespace facepix
