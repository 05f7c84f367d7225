#pragma once

#include <span>
#include <vector>

namespace facepix {

// k(u,v) = exp(-||u-v||^2 / (2 bandwidth^2))
double gaussian_kernel(std::span<const double> u, std::span<const double> v, double bandwidth);

// Median of all pairwise Euclidean distances (0 for fewer than 2 points).
double median_pairwise_distance(const std::vector<std::vector<double>>& points);

// Linear-time MMD^2 h-terms over two time-paired samples of equal length:
//   h_i = k(x_{2i-1},x_{2i}) + k(y_{2i-1},y_{2i})
//       - k(x_{2i-1},y_{2i}) - k(x_{2i},y_{2i-1})
// Result has floor(n/2) entries; their mean is the unbiased MMD^2 estimate.
std::vector<double> mmd_h(const std::vector<std::vector<double>>& x,
                          const std::vector<std::vector<double>>& y, double bandwidth);

}  // namespace facepix
