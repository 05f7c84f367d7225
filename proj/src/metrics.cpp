#include "facepix/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

#include "facepix/hungarian.hpp"

namespace facepix {

FrameMatchResult match_frame(std::span<const BBox> outputs, std::span<const BBox> annotations,
                             double iou_floor) {
  const BoxMatch m = match_boxes(outputs, annotations, iou_floor);
  FrameMatchResult res;
  res.pairs = m.pairs;
  res.unmatched_outputs = m.unmatched_rows;
  res.unmatched_annotations = m.unmatched_cols;
  return res;
}

MetricsReport evaluate(const std::vector<OutputBox>& outputs, const AnnotationSet& annotations,
                       double iou_floor) {
  std::map<std::int64_t, std::vector<OutputBox>> outs_by_frame;
  for (const OutputBox& b : outputs) outs_by_frame[b.frame].push_back(b);

  std::map<std::int64_t, std::vector<Annotation>> gt_by_frame;
  for (const Annotation& a : annotations.items)
    if (!a.is_streamer) gt_by_frame[a.frame].push_back(a);

  std::vector<std::int64_t> frames;
  for (const auto& [f, v] : outs_by_frame) frames.push_back(f);
  for (const auto& [f, v] : gt_by_frame) frames.push_back(f);
  std::sort(frames.begin(), frames.end());
  frames.erase(std::unique(frames.begin(), frames.end()), frames.end());

  MetricsReport rep;
  std::map<int, int> last_track;                 // gt person -> output track of last match
  std::map<int, std::int64_t> last_correct;      // gt person -> last correctly pixelated frame
  std::map<int, std::int64_t> run_length;

  for (std::int64_t f : frames) {
    const auto& outs = outs_by_frame.count(f) ? outs_by_frame[f] : std::vector<OutputBox>{};
    const auto& gts = gt_by_frame.count(f) ? gt_by_frame[f] : std::vector<Annotation>{};

    std::vector<BBox> out_boxes(outs.size()), gt_boxes(gts.size());
    for (std::size_t i = 0; i < outs.size(); ++i) out_boxes[i] = outs[i].box;
    for (std::size_t i = 0; i < gts.size(); ++i) gt_boxes[i] = gts[i].box;
    const FrameMatchResult match = match_frame(out_boxes, gt_boxes, iou_floor);

    FrameTally tally;
    tally.frame = f;
    tally.g = static_cast<int>(gts.size());
    for (const auto& [oi, gi] : match.pairs) {
      const Annotation& gt = gts[gi];
      if (gt.over_pixelation) {
        ++tally.over_pix;
        continue;
      }
      ++tally.matched;
      tally.overlap_sum += iou(out_boxes[oi], gt_boxes[gi]);
      const auto it = last_track.find(gt.person_id);
      if (it != last_track.end() && it->second != outs[oi].person_id) ++tally.mismatch;
      last_track[gt.person_id] = outs[oi].person_id;

      auto& run = run_length[gt.person_id];
      auto& last = last_correct[gt.person_id];
      run = (run > 0 && last + 1 == f) ? run + 1 : 1;
      last = f;
      rep.mp = std::max(rep.mp, run);
    }
    for (int gi : match.unmatched_annotations)
      if (!gts[gi].over_pixelation) ++tally.miss;
    tally.fp = static_cast<int>(match.unmatched_outputs.size());

    rep.sum_g += tally.g;
    rep.sum_miss += tally.miss;
    rep.sum_fp += tally.fp;
    rep.sum_mismatch += tally.mismatch;
    rep.sum_matched += tally.matched;
    rep.sum_over_pix += tally.over_pix;
    rep.sum_overlap += tally.overlap_sum;
    rep.per_frame.push_back(tally);
  }

  if (rep.sum_g > 0) {
    rep.mfpa = 1.0 - static_cast<double>(rep.sum_miss + rep.sum_fp + rep.sum_mismatch) /
                         static_cast<double>(rep.sum_g);
    rep.opr = static_cast<double>(rep.sum_over_pix) / static_cast<double>(rep.sum_g);
  }
  if (rep.sum_matched > 0)
    rep.mfpp = rep.sum_overlap / static_cast<double>(rep.sum_matched);
  return rep;
}

std::string MetricsReport::to_text() const {
  std::ostringstream out;
  auto num = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return std::string(buf);
  };
  out << "mfpa=" << (mfpa ? num(*mfpa) : "absent") << '\n';
  out << "mfpp=" << (mfpp ? num(*mfpp) : "absent") << '\n';
  out << "mp=" << mp << '\n';
  out << "opr=" << num(opr) << '\n';
  out << "nop=" << (nop_supported ? "supported" : "required") << '\n';
  out << "sum_g=" << sum_g << '\n';
  out << "sum_miss=" << sum_miss << '\n';
  out << "sum_fp=" << sum_fp << '\n';
  out << "sum_mismatch=" << sum_mismatch << '\n';
  out << "sum_matched=" << sum_matched << '\n';
  out << "sum_over_pixelation=" << sum_over_pix << '\n';
  out << "sum_overlap=" << num(sum_overlap) << '\n';
  out << "frames=" << per_frame.size() << '\n';
  out << "# frame,g,miss,fp,mismatch,matched,over_pix,overlap_sum\n";
  for (const FrameTally& t : per_frame)
    out << t.frame << ',' << t.g << ',' << t.miss << ',' << t.fp << ',' << t.mismatch << ','
        << t.matched << ',' << t.over_pix << ',' << num(t.overlap_sum) << '\n';
  return out.str();
}

}  // namespace facepix
