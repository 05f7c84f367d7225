#include "facepix/types.hpp"

#include <algorithm>

namespace facepix {

double iou(const BBox& a, const BBox& b) {
  const double x0 = std::max(a.x, b.x);
  const double y0 = std::max(a.y, b.y);
  const double x1 = std::min(a.x + a.w, b.x + b.w);
  const double y1 = std::min(a.y + a.h, b.y + b.h);
  if (x1 <= x0 || y1 <= y0) return 0.0;
  const double inter = (x1 - x0) * (y1 - y0);
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

BBox union_box(const BBox& a, const BBox& b) {
  const double x0 = std::min(a.x, b.x);
  const double y0 = std::min(a.y, b.y);
  const double x1 = std::max(a.x + a.w, b.x + b.w);
  const double y1 = std::max(a.y + a.h, b.y + b.h);
  return BBox{x0, y0, x1 - x0, y1 - y0};
}

BBox dilate(const BBox& b, double factor) {
  const double w = b.w * factor;
  const double h = b.h * factor;
  return BBox{b.cx() - w / 2.0, b.cy() - h / 2.0, w, h};
}

const char* to_string(EntryStatus s) {
  switch (s) {
    case EntryStatus::detected: return "detected";
    case EntryStatus::interpolated: return "interpolated";
    case EntryStatus::refined: return "refined";
  }
  return "?";
}

void AnnotationSet::sort() {
  std::stable_sort(items.begin(), items.end(), [](const Annotation& a, const Annotation& b) {
    if (a.frame != b.frame) return a.frame < b.frame;
    return a.person_id < b.person_id;
  });
}

std::int64_t AnnotationSet::max_frame() const {
  std::int64_t m = -1;
  for (const auto& a : items) m = std::max(m, a.frame);
  return m;
}

}  // namespace facepix
