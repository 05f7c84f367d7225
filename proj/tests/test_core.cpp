#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "facepix/container.hpp"
#include "facepix/records.hpp"
#include "facepix/rng.hpp"
#include "facepix/types.hpp"

using namespace facepix;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("iou basics") {
  const BBox a{0, 0, 10, 10};
  CHECK(iou(a, a) == doctest::Approx(1.0));
  CHECK(iou(a, BBox{20, 20, 5, 5}) == 0.0);
  // overlap 5x10 = 50, union 100+100-50 = 150
  CHECK(iou(a, BBox{5, 0, 10, 10}) == doctest::Approx(50.0 / 150.0));
}

TEST_CASE("iou is symmetric, bounded, and 1 only for identical boxes") {
  Rng rng(123);
  for (int t = 0; t < 500; ++t) {
    const BBox a{rng.uniform(0, 50), rng.uniform(0, 50), rng.uniform(1, 30), rng.uniform(1, 30)};
    const BBox b{rng.uniform(0, 50), rng.uniform(0, 50), rng.uniform(1, 30), rng.uniform(1, 30)};
    const double ab = iou(a, b);
    CHECK(ab == iou(b, a));
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
    if (ab == 1.0) {
      CHECK(a.x == b.x);
      CHECK(a.y == b.y);
      CHECK(a.w == b.w);
      CHECK(a.h == b.h);
    }
  }
}

TEST_CASE("box dilation keeps the center") {
  const BBox b{10, 20, 8, 4};
  const BBox d = dilate(b, 1.5);
  CHECK(d.cx() == doctest::Approx(b.cx()));
  CHECK(d.cy() == doctest::Approx(b.cy()));
  CHECK(d.w == doctest::Approx(12.0));
  CHECK(d.h == doctest::Approx(6.0));
}

TEST_CASE("frame container round trip is bit exact") {
  FrameStream s;
  s.width = 7;
  s.height = 5;
  s.fps = 24;
  Rng rng(7);
  for (int i = 0; i < 3; ++i) {
    Frame f;
    f.index = i;
    f.width = s.width;
    f.height = s.height;
    f.pixels.resize(7 * 5 * 3);
    for (auto& p : f.pixels) p = static_cast<std::uint8_t>(rng.uniform_int(256));
    s.frames.push_back(std::move(f));
  }
  const std::string path = temp_path("fpx_roundtrip.fpvl");
  write_frame_container(path, s);
  const FrameStream r = read_frame_container(path);
  REQUIRE(r.frames.size() == 3);
  CHECK(r.width == 7);
  CHECK(r.height == 5);
  CHECK(r.fps == 24);
  for (int i = 0; i < 3; ++i) CHECK(r.frames[i].pixels == s.frames[i].pixels);
}

TEST_CASE("container with one black 2x2 frame") {
  FrameStream s;
  s.width = 2;
  s.height = 2;
  s.fps = 30;
  s.frames.push_back(Frame{0, 2, 2, std::vector<std::uint8_t>(12, 0)});
  const std::string path = temp_path("fpx_black.fpvl");
  write_frame_container(path, s);
  const FrameStream r = read_frame_container(path);
  REQUIRE(r.frames.size() == 1);
  CHECK(r.frames[0].pixels == std::vector<std::uint8_t>(12, 0));
}

TEST_CASE("container header errors") {
  const std::string path = temp_path("fpx_bad.fpvl");
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << "NOPE";
  }
  CHECK_THROWS_WITH_AS(read_frame_container(path), doctest::Contains("magic"), std::runtime_error);

  {
    // valid magic, zero width
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    const unsigned char header[] = {'F', 'P', 'V', 'L', 0, 0, 0, 0, 2, 0, 0, 0,
                                    30, 0, 0, 0, 0, 0, 0, 0};
    out.write(reinterpret_cast<const char*>(header), sizeof header);
  }
  CHECK_THROWS_WITH_AS(read_frame_container(path), doctest::Contains("zero"), std::runtime_error);

  // declared 3 frames, only 2 present
  FrameStream s;
  s.width = 2;
  s.height = 2;
  s.fps = 30;
  for (int i = 0; i < 3; ++i) s.frames.push_back(Frame{i, 2, 2, std::vector<std::uint8_t>(12, 9)});
  write_frame_container(path, s);
  {
    std::filesystem::resize_file(path, std::filesystem::file_size(path) - 12);
  }
  CHECK_THROWS_WITH_AS(read_frame_container(path), doctest::Contains("truncated"), std::runtime_error);
}

TEST_CASE("detection records: empty file, normalization, order") {
  const std::string path = temp_path("fpx_dets.txt");
  {
    std::ofstream out(path, std::ios::trunc);
  }
  CHECK(read_detections(path, 4).empty());

  // one record with embedding of norm 2, plus two same-frame records
  std::vector<FaceVector> dets;
  FaceVector a;
  a.frame_index = 1;
  a.bbox = BBox{1, 2, 3, 4};
  a.confidence = 0.9;
  a.embedding = {2, 0, 0, 0};  // norm 2
  a.feat32.assign(kFeatDim, 0.5);
  FaceVector b = a;
  b.bbox = BBox{5, 6, 7, 8};
  b.embedding = {0, 1, 0, 0};
  FaceVector c = a;
  c.frame_index = 0;
  write_detections(path, {a, b, c});

  const auto r = read_detections(path, 4);
  REQUIRE(r.size() == 3);
  CHECK(r[0].frame_index == 0);  // sorted by frame
  CHECK(r[1].frame_index == 1);
  CHECK(r[2].frame_index == 1);
  CHECK(r[1].bbox.x == 1);  // intra-frame order preserved
  CHECK(r[2].bbox.x == 5);
  CHECK(r[1].embedding[0] == doctest::Approx(1.0));  // renormalized, direction kept
  for (const auto& d : r) {
    double n2 = 0;
    for (double e : d.embedding) n2 += e * e;
    CHECK(n2 == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("detection record errors") {
  const std::string path = temp_path("fpx_badrec.txt");
  {
    std::ofstream out(path, std::ios::trunc);
    out << "0 1 2 3 4 0.5 1 0\n";  // wrong field count for D=4
  }
  CHECK_THROWS_WITH_AS(read_detections(path, 4), doctest::Contains("fields"), std::runtime_error);
  {
    std::ofstream out(path, std::ios::trunc);
    out << "0 1 2 3 4 0.5 0 0 0 0";
    for (int i = 0; i < kFeatDim; ++i) out << " 0.1";
    out << "\n";
  }
  CHECK_THROWS_WITH_AS(read_detections(path, 4), doctest::Contains("zero-norm"), std::runtime_error);
  {
    std::ofstream out(path, std::ios::trunc);
    out << "0 1 2 3 4 0.5 nan 0 0 1";
    for (int i = 0; i < kFeatDim; ++i) out << " 0.1";
    out << "\n";
  }
  CHECK_THROWS_WITH_AS(read_detections(path, 4), doctest::Contains("non-finite"), std::runtime_error);
}

TEST_CASE("annotation and output box files round trip") {
  AnnotationSet ann;
  ann.items.push_back(Annotation{3, 1, BBox{1, 2, 3, 4}, true, false});
  ann.items.push_back(Annotation{0, 2, BBox{5, 6, 7, 8}, false, true});
  const std::string apath = temp_path("fpx_ann.csv");
  write_annotations(apath, ann);
  const AnnotationSet r = read_annotations(apath);
  REQUIRE(r.items.size() == 2);
  CHECK(r.items[0].frame == 0);  // sorted
  CHECK(r.items[0].over_pixelation);
  CHECK(r.items[1].is_streamer);
  CHECK(r.items[1].box.w == 3);

  const std::string bpath = temp_path("fpx_boxes.csv");
  write_output_boxes(bpath, {OutputBox{4, 7, BBox{1, 1, 2, 2}}});
  const auto boxes = read_output_boxes(bpath);
  REQUIRE(boxes.size() == 1);
  CHECK(boxes[0].frame == 4);
  CHECK(boxes[0].person_id == 7);
}

TEST_CASE("candidate records round trip") {
  Candidate c;
  c.frame_index = 9;
  c.bbox = BBox{1, 2, 3, 4};
  c.score = 0.75;
  c.feat32.assign(kFeatDim, -0.25);
  const std::string path = temp_path("fpx_cands.txt");
  write_candidates(path, {c});
  const auto r = read_candidates(path);
  REQUIRE(r.size() == 1);
  CHECK(r[0].frame_index == 9);
  CHECK(r[0].score == doctest::Approx(0.75));
  CHECK(r[0].feat32 == c.feat32);
}
