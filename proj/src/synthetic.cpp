#include "facepix/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "facepix/config.hpp"
#include "facepix/rng.hpp"

namespace facepix {

namespace {

std::vector<FrameInterval> parse_intervals(const std::string& text) {
  std::vector<FrameInterval> out;
  std::istringstream in(text);
  std::string part;
  while (std::getline(in, part, ';')) {
    if (part.empty()) continue;
    const auto dash = part.find('-');
    if (dash == std::string::npos) throw std::runtime_error("bad interval: " + part);
    out.emplace_back(std::stoll(part.substr(0, dash)), std::stoll(part.substr(dash + 1)));
  }
  return out;
}

std::vector<std::pair<std::int64_t, BBox>> parse_path(const std::string& text) {
  std::vector<std::pair<std::int64_t, BBox>> keys;
  std::istringstream in(text);
  std::string part;
  while (std::getline(in, part, ';')) {
    if (part.empty()) continue;
    const auto colon = part.find(':');
    if (colon == std::string::npos) throw std::runtime_error("bad path keyframe: " + part);
    const std::int64_t frame = std::stoll(part.substr(0, colon));
    std::istringstream nums(part.substr(colon + 1));
    std::string tok;
    std::vector<double> v;
    while (std::getline(nums, tok, ',')) v.push_back(std::stod(tok));
    if (v.size() != 4) throw std::runtime_error("path keyframe needs x,y,w,h: " + part);
    keys.emplace_back(frame, BBox{v[0], v[1], v[2], v[3]});
  }
  if (keys.empty()) throw std::runtime_error("person path is empty");
  std::sort(keys.begin(), keys.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return keys;
}

bool in_intervals(const std::vector<FrameInterval>& ivs, std::int64_t f) {
  for (const auto& [a, b] : ivs)
    if (f >= a && f <= b) return true;
  return false;
}

std::vector<double> random_unit(Rng& rng, int dim) {
  std::vector<double> v(dim);
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (double& x : v) {
      x = rng.gauss();
      norm2 += x * x;
    }
  } while (norm2 == 0.0);
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& x : v) x *= inv;
  return v;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::vector<double> jittered_embedding(Rng& rng, const std::vector<double>& center, double jitter) {
  const int dim = static_cast<int>(center.size());
  std::vector<double> e(center);
  const double scale = jitter / std::sqrt(static_cast<double>(dim));
  double norm2 = 0.0;
  for (int i = 0; i < dim; ++i) {
    e[i] += scale * rng.gauss();
    norm2 += e[i] * e[i];
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& x : e) x *= inv;
  return e;
}

// person colors cycle a small palette; faces get a two-tone pattern so that
// blurring them visibly changes pixels
void draw_face(Frame& frame, const BBox& box, int person) {
  static const std::uint8_t palette[6][3] = {{200, 160, 120}, {150, 200, 120}, {120, 160, 220},
                                             {220, 120, 160}, {160, 220, 200}, {220, 200, 120}};
  const std::uint8_t* base = palette[person % 6];
  const int x0 = std::max(0, static_cast<int>(std::lround(box.x)));
  const int y0 = std::max(0, static_cast<int>(std::lround(box.y)));
  const int x1 = std::min(frame.width, static_cast<int>(std::lround(box.x + box.w)));
  const int y1 = std::min(frame.height, static_cast<int>(std::lround(box.y + box.h)));
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) {
      std::uint8_t* px = frame.at(x, y);
      const bool dark = ((x - x0) / 4 + (y - y0) / 4) % 2 == 0;
      px[0] = dark ? base[0] / 2 : base[0];
      px[1] = dark ? base[1] / 2 : base[1];
      px[2] = dark ? base[2] / 2 : base[2];
    }
  }
}

}  // namespace

BBox path_box_at(const PersonSpec& person, std::int64_t frame) {
  const auto& keys = person.path_keys;
  if (frame <= keys.front().first) return keys.front().second;
  if (frame >= keys.back().first) return keys.back().second;
  for (std::size_t i = 1; i < keys.size(); ++i) {
    if (frame > keys[i].first) continue;
    const auto& [f0, b0] = keys[i - 1];
    const auto& [f1, b1] = keys[i];
    const double t = static_cast<double>(frame - f0) / static_cast<double>(f1 - f0);
    return BBox{b0.x + (b1.x - b0.x) * t, b0.y + (b1.y - b0.y) * t, b0.w + (b1.w - b0.w) * t,
                b0.h + (b1.h - b0.h) * t};
  }
  return keys.back().second;
}

SyntheticScenario SyntheticScenario::from_file(const std::string& path) {
  const Config cfg = Config::from_file(path);
  std::ostringstream echo;
  for (const auto& [k, v] : cfg.values()) echo << k << '=' << v << '\n';
  return from_string(echo.str());
}

SyntheticScenario SyntheticScenario::from_string(const std::string& text) {
  const Config cfg = Config::from_string(text);
  SyntheticScenario sc;
  sc.seed = static_cast<std::uint64_t>(cfg.get("seed", static_cast<std::int64_t>(1)));
  sc.frames = cfg.get("frames", static_cast<std::int64_t>(0));
  sc.width = cfg.get("width", 320);
  sc.height = cfg.get("height", 240);
  sc.fps = cfg.get("fps", 30);
  sc.embedding_dim = cfg.get("embedding_dim", 512);
  sc.embed_jitter = cfg.get("embed_jitter", 0.05);
  sc.embed_drift = cfg.get("embed_drift", 0.0);
  sc.feat_jitter = cfg.get("feat_jitter", 0.05);
  sc.miss_rate = cfg.get("miss_rate", 0.0);
  sc.fp_rate = cfg.get("fp_rate", 0.0);
  sc.center_separation = cfg.get("center_separation", 0.5);
  sc.occlusion_candidates = cfg.get("occlusion_candidates", 2);

  const int persons = cfg.get("persons", 0);
  if (sc.frames <= 0) throw std::runtime_error("scenario needs frames > 0");
  if (persons <= 0) throw std::runtime_error("scenario needs persons > 0");
  for (int p = 0; p < persons; ++p) {
    const std::string prefix = "person." + std::to_string(p) + ".";
    if (!cfg.has(prefix + "path"))
      throw std::runtime_error("scenario missing " + prefix + "path");
    PersonSpec spec;
    spec.streamer = cfg.get_flag(prefix + "streamer", false);
    spec.path_keys = parse_path(cfg.get(prefix + "path", ""));
    spec.occlude = parse_intervals(cfg.get(prefix + "occlude", ""));
    spec.miss = parse_intervals(cfg.get(prefix + "miss", ""));
    spec.absent = parse_intervals(cfg.get(prefix + "absent", ""));
    sc.persons.push_back(std::move(spec));
  }
  return sc;
}

SyntheticDataset synth_generate(const SyntheticScenario& sc) {
  const int n_persons = static_cast<int>(sc.persons.size());
  if (n_persons == 0) throw std::invalid_argument("scenario has no persons");

  SyntheticDataset ds;
  ds.stream.width = sc.width;
  ds.stream.height = sc.height;
  ds.stream.fps = sc.fps;

  // identity centers with pairwise cosine below the configured separation
  Rng center_rng(sc.seed ^ 0xA5A5A5A5ULL);
  for (int p = 0; p < n_persons; ++p) {
    std::vector<double> c;
    for (int attempt = 0; attempt < 1000; ++attempt) {
      c = random_unit(center_rng, sc.embedding_dim);
      bool ok = true;
      for (const auto& other : ds.identity_centers)
        if (cosine(c, other) >= sc.center_separation) ok = false;
      if (ok) break;
      c.clear();
    }
    if (c.empty())
      throw std::runtime_error("could not separate identity centers at the configured cosine");
    ds.identity_centers.push_back(std::move(c));
  }

  // per-person drift directions: the identity rotates along a great circle
  // toward an orthogonal direction as the stream progresses (pose/lighting
  // slowly changing), which keeps adjacent frames close and endpoints apart
  std::vector<std::vector<double>> drift_dirs;
  if (sc.embed_drift != 0.0) {
    Rng drift_rng(sc.seed ^ 0x0F0F0F0FULL);
    for (int p = 0; p < n_persons; ++p) {
      auto dir = random_unit(drift_rng, sc.embedding_dim);
      const double along = cosine(dir, ds.identity_centers[p]);
      double n2 = 0.0;
      for (int d = 0; d < sc.embedding_dim; ++d) {
        dir[d] -= along * ds.identity_centers[p][d];
        n2 += dir[d] * dir[d];
      }
      for (double& v : dir) v /= std::sqrt(n2);
      drift_dirs.push_back(std::move(dir));
    }
  }
  auto center_at = [&](int person, std::int64_t frame) {
    if (sc.embed_drift == 0.0) return ds.identity_centers[person];
    const double theta =
        sc.embed_drift * static_cast<double>(frame) / static_cast<double>(sc.frames);
    std::vector<double> c(sc.embedding_dim);
    for (int d = 0; d < sc.embedding_dim; ++d)
      c[d] = std::cos(theta) * ds.identity_centers[person][d] +
             std::sin(theta) * drift_dirs[person][d];
    return c;
  };

  // fixed seeded 32 x D projection, variance 1/32 entries: feat \approx P e
  Rng proj_rng(sc.seed ^ 0x5A5A5A5AULL);
  ds.projection.assign(kFeatDim, std::vector<double>(sc.embedding_dim));
  const double proj_scale = 1.0 / std::sqrt(static_cast<double>(kFeatDim));
  for (auto& row : ds.projection)
    for (double& v : row) v = proj_scale * proj_rng.gauss();

  auto project = [&](const std::vector<double>& e) {
    std::vector<double> f(kFeatDim, 0.0);
    for (int r = 0; r < kFeatDim; ++r) {
      double s = 0.0;
      for (int d = 0; d < sc.embedding_dim; ++d) s += ds.projection[r][d] * e[d];
      f[r] = s;
    }
    return f;
  };

  // background directions stay away from every identity center
  Rng bg_rng(sc.seed ^ 0xC3C3C3C3ULL);
  auto background_feat = [&]() {
    for (int attempt = 0; attempt < 1000; ++attempt) {
      auto u = random_unit(bg_rng, sc.embedding_dim);
      bool far = true;
      for (const auto& c : ds.identity_centers)
        if (std::fabs(cosine(u, c)) >= 0.3) far = false;
      if (!far) continue;
      auto f = project(u);
      for (double& v : f) v += sc.feat_jitter * bg_rng.gauss();
      return f;
    }
    throw std::runtime_error("could not sample a background direction away from identities");
  };

  Rng det_rng(sc.seed ^ 0x3C3C3C3CULL);
  Rng cand_rng(sc.seed ^ 0x69696969ULL);

  ds.detections_by_frame.resize(sc.frames);
  ds.candidates_by_frame.resize(sc.frames);
  ds.stream.frames.resize(sc.frames);

  for (std::int64_t f = 0; f < sc.frames; ++f) {
    Frame& frame = ds.stream.frames[f];
    frame.index = f;
    frame.width = sc.width;
    frame.height = sc.height;
    frame.pixels.assign(static_cast<std::size_t>(sc.width) * sc.height * 3, 40);  // flat backdrop

    for (int p = 0; p < n_persons; ++p) {
      const PersonSpec& person = sc.persons[p];
      if (in_intervals(person.absent, f)) continue;
      const BBox box = path_box_at(person, f);
      const bool occluded = in_intervals(person.occlude, f);

      if (!occluded) draw_face(frame, box, p);

      Annotation ann;
      ann.frame = f;
      ann.person_id = p;
      ann.box = box;
      ann.is_streamer = person.streamer;
      ann.over_pixelation = occluded;
      ds.annotations.items.push_back(ann);

      if (occluded) {
        // only background clutter can be proposed where the face is hidden
        for (int c = 0; c < sc.occlusion_candidates; ++c) {
          Candidate cand;
          cand.frame_index = f;
          cand.bbox = BBox{box.x + cand_rng.uniform(-box.w / 3, box.w / 3),
                           box.y + cand_rng.uniform(-box.h / 3, box.h / 3), box.w, box.h};
          cand.score = 0.3 + 0.4 * cand_rng.uniform();
          cand.feat32 = background_feat();
          ds.candidates_by_frame[f].push_back(std::move(cand));
        }
        continue;
      }

      const bool missed = in_intervals(person.miss, f) || det_rng.bernoulli(sc.miss_rate);
      const auto embedding = jittered_embedding(det_rng, center_at(p, f), sc.embed_jitter);
      auto feat = project(embedding);
      for (double& v : feat) v += sc.feat_jitter * det_rng.gauss();

      if (missed) {
        // recoverable: the proposal stage can still find it near the truth
        Candidate cand;
        cand.frame_index = f;
        cand.bbox = BBox{box.x + cand_rng.uniform(-1.0, 1.0), box.y + cand_rng.uniform(-1.0, 1.0),
                         box.w, box.h};
        cand.score = 0.6 + 0.4 * cand_rng.uniform();
        cand.feat32 = std::move(feat);
        ds.candidates_by_frame[f].push_back(std::move(cand));
      } else {
        FaceVector fv;
        fv.frame_index = f;
        fv.bbox = box;
        fv.confidence = 0.9 + 0.1 * det_rng.uniform();
        fv.embedding = embedding;
        fv.feat32 = std::move(feat);
        ds.detections_by_frame[f].push_back(std::move(fv));
      }
    }

    // spurious detections
    if (sc.fp_rate > 0.0 && det_rng.bernoulli(std::min(1.0, sc.fp_rate))) {
      FaceVector fv;
      fv.frame_index = f;
      const double w = 16 + 16 * det_rng.uniform();
      const double h = 16 + 16 * det_rng.uniform();
      fv.bbox = BBox{det_rng.uniform(0, sc.width - w), det_rng.uniform(0, sc.height - h), w, h};
      fv.confidence = 0.5 + 0.3 * det_rng.uniform();
      fv.embedding = random_unit(det_rng, sc.embedding_dim);
      fv.feat32 = background_feat();
      ds.detections_by_frame[f].push_back(std::move(fv));
    }
  }
  ds.annotations.sort();
  return ds;
}

std::vector<FaceVector> SyntheticDataset::all_detections() const {
  std::vector<FaceVector> out;
  for (const auto& frame : detections_by_frame) out.insert(out.end(), frame.begin(), frame.end());
  return out;
}

std::vector<Candidate> SyntheticDataset::all_candidates() const {
  std::vector<Candidate> out;
  for (const auto& frame : candidates_by_frame) out.insert(out.end(), frame.begin(), frame.end());
  return out;
}

}  // namespace facepix
