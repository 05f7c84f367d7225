#include "facepix/records.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace facepix {

namespace {

// strtod-based so that nan/inf tokens parse and then fail the finite check
std::vector<double> parse_numbers(const std::string& line) {
  std::vector<double> out;
  const char* p = line.c_str();
  while (*p != '\0') {
    char* end = nullptr;
    const double v = std::strtod(p, &end);
    if (end == p) break;
    out.push_back(v);
    p = end;
  }
  return out;
}

void require_finite(const std::vector<double>& vals, const std::string& where) {
  for (double v : vals)
    if (!std::isfinite(v)) throw std::runtime_error("non-finite value in " + where);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

}  // namespace

std::vector<FaceVector> read_detections(const std::string& path, int embedding_dim) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open detections file: " + path);
  std::vector<FaceVector> out;
  std::string line;
  std::size_t lineno = 0;
  const std::size_t expected = 6 + static_cast<std::size_t>(embedding_dim) + kFeatDim;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto vals = parse_numbers(line);
    if (vals.empty()) continue;
    const std::string where = path + ":" + std::to_string(lineno);
    if (vals.size() != expected)
      throw std::runtime_error("detection record at " + where + " has " + std::to_string(vals.size()) +
                               " fields, expected " + std::to_string(expected) +
                               " (embedding_dim=" + std::to_string(embedding_dim) + ")");
    require_finite(vals, where);

    FaceVector fv;
    fv.frame_index = static_cast<std::int64_t>(vals[0]);
    fv.bbox = BBox{vals[1], vals[2], vals[3], vals[4]};
    fv.confidence = vals[5];
    fv.embedding.assign(vals.begin() + 6, vals.begin() + 6 + embedding_dim);
    fv.feat32.assign(vals.begin() + 6 + embedding_dim, vals.end());

    double norm2 = 0.0;
    for (double e : fv.embedding) norm2 += e * e;
    const double norm = std::sqrt(norm2);
    if (norm <= 0.0) throw std::runtime_error("zero-norm embedding at " + where);
    for (double& e : fv.embedding) e /= norm;
    out.push_back(std::move(fv));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const FaceVector& a, const FaceVector& b) { return a.frame_index < b.frame_index; });
  return out;
}

void write_detections(const std::string& path, const std::vector<FaceVector>& dets) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write detections file: " + path);
  for (const auto& d : dets) {
    out << d.frame_index << ' ' << fmt(d.bbox.x) << ' ' << fmt(d.bbox.y) << ' ' << fmt(d.bbox.w) << ' '
        << fmt(d.bbox.h) << ' ' << fmt(d.confidence);
    for (double e : d.embedding) out << ' ' << fmt(e);
    for (double f : d.feat32) out << ' ' << fmt(f);
    out << '\n';
  }
}

std::vector<Candidate> read_candidates(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open candidates file: " + path);
  std::vector<Candidate> out;
  std::string line;
  std::size_t lineno = 0;
  const std::size_t expected = 6 + kFeatDim;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto vals = parse_numbers(line);
    if (vals.empty()) continue;
    const std::string where = path + ":" + std::to_string(lineno);
    if (vals.size() != expected)
      throw std::runtime_error("candidate record at " + where + " has " + std::to_string(vals.size()) +
                               " fields, expected " + std::to_string(expected));
    require_finite(vals, where);
    Candidate c;
    c.frame_index = static_cast<std::int64_t>(vals[0]);
    c.bbox = BBox{vals[1], vals[2], vals[3], vals[4]};
    c.score = vals[5];
    c.feat32.assign(vals.begin() + 6, vals.end());
    out.push_back(std::move(c));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Candidate& a, const Candidate& b) { return a.frame_index < b.frame_index; });
  return out;
}

void write_candidates(const std::string& path, const std::vector<Candidate>& cands) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write candidates file: " + path);
  for (const auto& c : cands) {
    out << c.frame_index << ' ' << fmt(c.bbox.x) << ' ' << fmt(c.bbox.y) << ' ' << fmt(c.bbox.w) << ' '
        << fmt(c.bbox.h) << ' ' << fmt(c.score);
    for (double f : c.feat32) out << ' ' << fmt(f);
    out << '\n';
  }
}

AnnotationSet read_annotations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open annotations file: " + path);
  AnnotationSet set;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto parts = split_csv(line);
    if (parts.size() != 8)
      throw std::runtime_error("annotation at " + path + ":" + std::to_string(lineno) +
                               " has " + std::to_string(parts.size()) + " fields, expected 8");
    Annotation a;
    a.frame = std::stoll(parts[0]);
    a.person_id = std::stoi(parts[1]);
    a.box = BBox{std::stod(parts[2]), std::stod(parts[3]), std::stod(parts[4]), std::stod(parts[5])};
    a.is_streamer = std::stoi(parts[6]) != 0;
    a.over_pixelation = std::stoi(parts[7]) != 0;
    set.items.push_back(a);
  }
  set.sort();
  return set;
}

void write_annotations(const std::string& path, const AnnotationSet& ann) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write annotations file: " + path);
  for (const auto& a : ann.items) {
    out << a.frame << ',' << a.person_id << ',' << fmt(a.box.x) << ',' << fmt(a.box.y) << ','
        << fmt(a.box.w) << ',' << fmt(a.box.h) << ',' << (a.is_streamer ? 1 : 0) << ','
        << (a.over_pixelation ? 1 : 0) << '\n';
  }
}

std::vector<OutputBox> read_output_boxes(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open output boxes file: " + path);
  std::vector<OutputBox> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto parts = split_csv(line);
    if (parts.size() != 6)
      throw std::runtime_error("output box at " + path + ":" + std::to_string(lineno) +
                               " has " + std::to_string(parts.size()) + " fields, expected 6");
    OutputBox b;
    b.frame = std::stoll(parts[0]);
    b.person_id = std::stoi(parts[1]);
    b.box = BBox{std::stod(parts[2]), std::stod(parts[3]), std::stod(parts[4]), std::stod(parts[5])};
    out.push_back(b);
  }
  return out;
}

void write_output_boxes(const std::string& path, const std::vector<OutputBox>& boxes) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write output boxes file: " + path);
  for (const auto& b : boxes) {
    out << b.frame << ',' << b.person_id << ',' << fmt(b.box.x) << ',' << fmt(b.box.y) << ','
        << fmt(b.box.w) << ',' << fmt(b.box.h) << '\n';
  }
}

std::vector<std::vector<double>> read_feature_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open feature file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto vals = parse_numbers(line);
    if (vals.empty()) continue;
    require_finite(vals, path);
    rows.push_back(std::move(vals));
  }
  return rows;
}

void write_feature_rows(const std::string& path, const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write feature file: " + path);
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? " " : "") << fmt(r[i]);
    out << '\n';
  }
}

}  // namespace facepix
