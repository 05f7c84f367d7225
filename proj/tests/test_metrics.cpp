#include <doctest.h>

#include "facepix/metrics.hpp"

using namespace facepix;

namespace {

Annotation gt(std::int64_t frame, int person, BBox box, bool streamer = false, bool over = false) {
  return Annotation{frame, person, box, streamer, over};
}

OutputBox out(std::int64_t frame, int person, BBox box) { return OutputBox{frame, person, box}; }

}  // namespace

TEST_CASE("match_frame basics") {
  const std::vector<BBox> outs{{0, 0, 10, 10}};
  const std::vector<BBox> gts{{0, 0, 10, 10}};
  const auto m = match_frame(outs, gts, 0.3);
  REQUIRE(m.pairs.size() == 1);
  CHECK(m.unmatched_outputs.empty());
  CHECK(m.unmatched_annotations.empty());

  const auto fp = match_frame(outs, std::vector<BBox>{{50, 50, 10, 10}}, 0.3);
  CHECK(fp.pairs.empty());
  CHECK(fp.unmatched_outputs.size() == 1);
  CHECK(fp.unmatched_annotations.size() == 1);
}

TEST_CASE("perfect pixelation of non-flagged truth maxes every metric") {
  AnnotationSet ann;
  std::vector<OutputBox> boxes;
  for (std::int64_t f = 0; f < 12; ++f) {
    ann.items.push_back(gt(f, 0, BBox{double(f), 0, 10, 10}));
    ann.items.push_back(gt(f, 1, BBox{double(f), 40, 12, 12}));
    ann.items.push_back(gt(f, 9, BBox{100, 100, 8, 8}, /*streamer=*/true));
    boxes.push_back(out(f, 0, BBox{double(f), 0, 10, 10}));
    boxes.push_back(out(f, 1, BBox{double(f), 40, 12, 12}));
  }
  const auto rep = evaluate(boxes, ann);
  REQUIRE(rep.mfpa.has_value());
  REQUIRE(rep.mfpp.has_value());
  CHECK(*rep.mfpa == doctest::Approx(1.0));
  CHECK(*rep.mfpp == doctest::Approx(1.0));
  CHECK(rep.opr == 0.0);
  CHECK(rep.mp == 12);
  CHECK(rep.nop_supported);
}

TEST_CASE("mfpa formula: g=10, one miss, one false positive") {
  AnnotationSet ann;
  std::vector<OutputBox> boxes;
  for (std::int64_t f = 0; f < 10; ++f) ann.items.push_back(gt(f, 0, BBox{0, 0, 10, 10}));
  for (std::int64_t f = 0; f < 9; ++f) boxes.push_back(out(f, 0, BBox{0, 0, 10, 10}));  // miss at 9
  boxes.push_back(out(3, 7, BBox{80, 80, 10, 10}));  // one spurious mosaic
  const auto rep = evaluate(boxes, ann);
  CHECK(*rep.mfpa == doctest::Approx(0.8));
}

TEST_CASE("all faces missed gives zero accuracy; no annotations gives absent") {
  AnnotationSet ann;
  for (std::int64_t f = 0; f < 5; ++f) ann.items.push_back(gt(f, 0, BBox{0, 0, 10, 10}));
  const auto rep = evaluate({}, ann);
  CHECK(*rep.mfpa == doctest::Approx(0.0));
  CHECK_FALSE(rep.mfpp.has_value());

  const auto empty = evaluate({}, AnnotationSet{});
  CHECK_FALSE(empty.mfpa.has_value());
}

TEST_CASE("mfpp averages matched overlaps") {
  AnnotationSet ann;
  ann.items.push_back(gt(0, 0, BBox{0, 0, 10, 10}));
  ann.items.push_back(gt(0, 1, BBox{40, 0, 10, 10}));
  std::vector<OutputBox> boxes;
  boxes.push_back(out(0, 0, BBox{0, 0, 10, 10}));   // IoU 1.0
  boxes.push_back(out(0, 1, BBox{40, 5, 10, 10}));  // IoU 5/15 = 1/3
  const auto rep = evaluate(boxes, ann);
  CHECK(*rep.mfpp == doctest::Approx((1.0 + 1.0 / 3.0) / 2.0));

  // singleton mean
  const auto single = evaluate({out(0, 1, BBox{40, 5, 10, 10})}, ann);
  CHECK(*single.mfpp == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("mp is the longest consecutive correct run") {
  AnnotationSet ann;
  std::vector<OutputBox> boxes;
  for (std::int64_t f : {0, 1, 2, 3, 4, 5, 6}) ann.items.push_back(gt(f, 0, BBox{0, 0, 10, 10}));
  for (std::int64_t f : {0, 1, 2, 5, 6}) boxes.push_back(out(f, 0, BBox{0, 0, 10, 10}));
  const auto rep = evaluate(boxes, ann);
  CHECK(rep.mp == 3);
  CHECK(evaluate({}, ann).mp == 0);
}

TEST_CASE("identity swap counts two mismatches at the swap frame") {
  AnnotationSet ann;
  std::vector<OutputBox> boxes;
  const BBox left{0, 0, 10, 10}, right{40, 0, 10, 10};
  for (std::int64_t f = 0; f < 4; ++f) {
    ann.items.push_back(gt(f, 0, left));
    ann.items.push_back(gt(f, 1, right));
  }
  for (std::int64_t f = 0; f < 2; ++f) {
    boxes.push_back(out(f, 100, left));
    boxes.push_back(out(f, 200, right));
  }
  for (std::int64_t f = 2; f < 4; ++f) {  // tracks swap at frame 2
    boxes.push_back(out(f, 200, left));
    boxes.push_back(out(f, 100, right));
  }
  const auto rep = evaluate(boxes, ann);
  CHECK(rep.sum_mismatch == 2);
  const auto& swap_frame = rep.per_frame[2];
  CHECK(swap_frame.mismatch == 2);
  CHECK(rep.per_frame[3].mismatch == 0);
}

TEST_CASE("over-pixelation counts mosaics matched to flagged truth") {
  AnnotationSet ann;
  std::vector<OutputBox> boxes;
  // 5-frame occlusion, flagged; a tracker-style output keeps pixelating
  for (std::int64_t f = 0; f < 10; ++f) {
    const bool occluded = f >= 3 && f < 8;
    ann.items.push_back(gt(f, 0, BBox{0, 0, 10, 10}, false, occluded));
    boxes.push_back(out(f, 0, BBox{0, 0, 10, 10}));
  }
  const auto rep = evaluate(boxes, ann);
  CHECK(rep.sum_over_pix == 5);
  CHECK(rep.opr == doctest::Approx(0.5));
  // refusing to pixelate the occlusion keeps opr at zero without misses
  std::vector<OutputBox> careful;
  for (std::int64_t f = 0; f < 10; ++f)
    if (f < 3 || f >= 8) careful.push_back(out(f, 0, BBox{0, 0, 10, 10}));
  const auto rep2 = evaluate(careful, ann);
  CHECK(rep2.opr == 0.0);
  CHECK(*rep2.mfpa == doctest::Approx(1.0));
}

TEST_CASE("report text carries the tallies") {
  AnnotationSet ann;
  ann.items.push_back(gt(0, 0, BBox{0, 0, 10, 10}));
  const auto rep = evaluate({out(0, 0, BBox{0, 0, 10, 10})}, ann);
  const std::string text = rep.to_text();
  CHECK(text.find("mfpa=1") != std::string::npos);
  CHECK(text.find("nop=supported") != std::string::npos);
  CHECK(text.find("sum_g=1") != std::string::npos);
}
