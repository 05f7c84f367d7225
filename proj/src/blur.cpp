#include "facepix/blur.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace facepix {

namespace {

constexpr double kWeightScale = 4096.0;
constexpr int kMaxRadius = 1024;  // taps beyond ~4.3 sigma quantize to zero anyway

struct Region {
  int x0, y0, x1, y1;  // half-open
  int w() const { return x1 - x0; }
  int h() const { return y1 - y0; }
  bool empty() const { return x1 <= x0 || y1 <= y0; }
};

Region clamp_region(const Frame& frame, const BBox& bbox) {
  Region r;
  r.x0 = std::max(0, static_cast<int>(std::floor(bbox.x)));
  r.y0 = std::max(0, static_cast<int>(std::floor(bbox.y)));
  r.x1 = std::min(frame.width, static_cast<int>(std::ceil(bbox.x + bbox.w)));
  r.y1 = std::min(frame.height, static_cast<int>(std::ceil(bbox.y + bbox.h)));
  return r;
}

}  // namespace

std::vector<std::uint32_t> gaussian_kernel_weights(double sigma, int radius) {
  if (sigma <= 0.0) throw std::invalid_argument("blur sigma must be positive");
  if (radius < 0) throw std::invalid_argument("blur radius must be >= 0");
  radius = std::min(radius, kMaxRadius);
  std::vector<std::uint32_t> w(2 * radius + 1);
  for (int t = -radius; t <= radius; ++t) {
    const double g = std::exp(-static_cast<double>(t) * t / (2.0 * sigma * sigma));
    w[t + radius] = static_cast<std::uint32_t>(std::lround(kWeightScale * g));
  }
  if (w[radius] == 0) w[radius] = 1;
  return w;
}

double auto_sigma(const BBox& bbox) { return std::max(0.5, std::max(bbox.w, bbox.h) / 6.0); }

int radius_for_sigma(double sigma) {
  return std::min(kMaxRadius, static_cast<int>(std::ceil(3.0 * sigma)));
}

void gaussian_blur_region(Frame& frame, const BBox& bbox, double sigma, int radius, bool parallel) {
  const Region r = clamp_region(frame, bbox);
  if (r.empty()) return;

  const auto weights = gaussian_kernel_weights(sigma, radius);
  radius = (static_cast<int>(weights.size()) - 1) / 2;
  std::int64_t wsum = 0;
  for (std::uint32_t w : weights) wsum += w;
  const std::int64_t total = wsum * wsum;
  const std::int64_t half = total / 2;

  const int rw = r.w(), rh = r.h();
  // horizontal pass into a separate buffer; the vertical pass then reads
  // only pristine sums, never pixels it has already written
  std::vector<std::int64_t> hsum(static_cast<std::size_t>(rw) * rh * 3);

#pragma omp parallel for schedule(static) if (parallel && rh >= 32)
  for (int y = 0; y < rh; ++y) {
    for (int x = 0; x < rw; ++x) {
      std::int64_t acc[3] = {0, 0, 0};
      for (int t = -radius; t <= radius; ++t) {
        const int sx = std::clamp(x + t, 0, rw - 1);
        const std::uint8_t* px = frame.at(r.x0 + sx, r.y0 + y);
        const std::int64_t w = weights[t + radius];
        acc[0] += w * px[0];
        acc[1] += w * px[1];
        acc[2] += w * px[2];
      }
      std::int64_t* out = &hsum[(static_cast<std::size_t>(y) * rw + x) * 3];
      out[0] = acc[0];
      out[1] = acc[1];
      out[2] = acc[2];
    }
  }

#pragma omp parallel for schedule(static) if (parallel && rh >= 32)
  for (int y = 0; y < rh; ++y) {
    for (int x = 0; x < rw; ++x) {
      std::int64_t acc[3] = {0, 0, 0};
      for (int t = -radius; t <= radius; ++t) {
        const int sy = std::clamp(y + t, 0, rh - 1);
        const std::int64_t* hs = &hsum[(static_cast<std::size_t>(sy) * rw + x) * 3];
        const std::int64_t w = weights[t + radius];
        acc[0] += w * hs[0];
        acc[1] += w * hs[1];
        acc[2] += w * hs[2];
      }
      std::uint8_t* px = frame.at(r.x0 + x, r.y0 + y);
      px[0] = static_cast<std::uint8_t>((acc[0] + half) / total);
      px[1] = static_cast<std::uint8_t>((acc[1] + half) / total);
      px[2] = static_cast<std::uint8_t>((acc[2] + half) / total);
    }
  }
}

namespace reference {

void gaussian_blur_region(Frame& frame, const BBox& bbox, double sigma, int radius) {
  const Region r = clamp_region(frame, bbox);
  if (r.empty()) return;
  const auto weights = gaussian_kernel_weights(sigma, radius);
  radius = (static_cast<int>(weights.size()) - 1) / 2;
  std::int64_t wsum = 0;
  for (std::uint32_t w : weights) wsum += w;
  const std::int64_t total = wsum * wsum;
  const std::int64_t half = total / 2;

  const int rw = r.w(), rh = r.h();
  std::vector<std::uint8_t> src(static_cast<std::size_t>(rw) * rh * 3);
  for (int y = 0; y < rh; ++y)
    for (int x = 0; x < rw; ++x)
      for (int c = 0; c < 3; ++c)
        src[(static_cast<std::size_t>(y) * rw + x) * 3 + c] = frame.at(r.x0 + x, r.y0 + y)[c];

  for (int y = 0; y < rh; ++y) {
    for (int x = 0; x < rw; ++x) {
      std::int64_t acc[3] = {0, 0, 0};
      for (int ty = -radius; ty <= radius; ++ty) {
        const int sy = std::clamp(y + ty, 0, rh - 1);
        for (int tx = -radius; tx <= radius; ++tx) {
          const int sx = std::clamp(x + tx, 0, rw - 1);
          const std::int64_t w =
              static_cast<std::int64_t>(weights[ty + radius]) * weights[tx + radius];
          const std::uint8_t* px = &src[(static_cast<std::size_t>(sy) * rw + sx) * 3];
          acc[0] += w * px[0];
          acc[1] += w * px[1];
          acc[2] += w * px[2];
        }
      }
      std::uint8_t* px = frame.at(r.x0 + x, r.y0 + y);
      px[0] = static_cast<std::uint8_t>((acc[0] + half) / total);
      px[1] = static_cast<std::uint8_t>((acc[1] + half) / total);
      px[2] = static_cast<std::uint8_t>((acc[2] + half) / total);
    }
  }
}

}  // namespace reference

}  // namespace facepix
