#include "facepix/mmd.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace facepix {

double gaussian_kernel(std::span<const double> u, std::span<const double> v, double bandwidth) {
  if (u.size() != v.size()) throw std::invalid_argument("kernel arguments differ in dimension");
  if (bandwidth <= 0.0) throw std::invalid_argument("kernel bandwidth must be positive");
  double d2 = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double d = u[i] - v[i];
    d2 += d * d;
  }
  return std::exp(-d2 / (2.0 * bandwidth * bandwidth));
}

double median_pairwise_distance(const std::vector<std::vector<double>>& points) {
  const std::size_t n = points.size();
  if (n < 2) return 0.0;
  std::vector<double> dists;
  dists.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double d2 = 0.0;
      for (std::size_t k = 0; k < points[i].size(); ++k) {
        const double d = points[i][k] - points[j][k];
        d2 += d * d;
      }
      dists.push_back(std::sqrt(d2));
    }
  }
  const std::size_t mid = dists.size() / 2;
  std::nth_element(dists.begin(), dists.begin() + mid, dists.end());
  double median = dists[mid];
  if (dists.size() % 2 == 0) {
    const auto lower = std::max_element(dists.begin(), dists.begin() + mid);
    median = (median + *lower) / 2.0;
  }
  return median;
}

std::vector<double> mmd_h(const std::vector<std::vector<double>>& x,
                          const std::vector<std::vector<double>>& y, double bandwidth) {
  if (x.size() != y.size()) throw std::invalid_argument("mmd_h samples must have equal length");
  if (x.size() < 2) throw std::invalid_argument("mmd_h needs at least 2 paired observations");
  const std::size_t pairs = x.size() / 2;
  std::vector<double> h(pairs);
  for (std::size_t i = 0; i < pairs; ++i) {
    const auto& x1 = x[2 * i];
    const auto& x2 = x[2 * i + 1];
    const auto& y1 = y[2 * i];
    const auto& y2 = y[2 * i + 1];
    h[i] = gaussian_kernel(x1, x2, bandwidth) + gaussian_kernel(y1, y2, bandwidth) -
           gaussian_kernel(x1, y2, bandwidth) - gaussian_kernel(x2, y1, bandwidth);
  }
  return h;
}

}  // namespace facepix
