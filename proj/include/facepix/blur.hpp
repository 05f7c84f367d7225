#pragma once

#include <cstdint>
#include <vector>

#include "facepix/types.hpp"

namespace facepix {

// Gaussian taps quantized to 1/4096 units so results are platform-exact.
// Index t in [-radius, radius] maps to weights[t + radius]; the center tap
// is always at least 1.
std::vector<std::uint32_t> gaussian_kernel_weights(double sigma, int radius);

// Separable Gaussian blur of the region bbox ∩ frame, integer arithmetic
// throughout, clamp-to-edge sampling within the region. Pixels outside the
// region are untouched; a region that clamps away is a no-op.
void gaussian_blur_region(Frame& frame, const BBox& bbox, double sigma, int radius,
                          bool parallel = true);

// sigma = max(w,h)/6 of the box, radius = ceil(3 sigma)
double auto_sigma(const BBox& bbox);
int radius_for_sigma(double sigma);

namespace reference {
// Direct 2D convolution with the same quantized taps; bit-identical to the
// separable path.
void gaussian_blur_region(Frame& frame, const BBox& bbox, double sigma, int radius);
}  // namespace reference

}  // namespace facepix
