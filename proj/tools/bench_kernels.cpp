// Compares the production OpenMP kernels against their serial runs and the
// naive reference implementations: affinity-propagation message passes and
// the separable region blur.

#include <chrono>
#include <cstdio>
#include <omp.h>
#include <vector>

#include "facepix/ap_cluster.hpp"
#include "facepix/blur.hpp"
#include "facepix/rng.hpp"
#include "facepix/types.hpp"

using namespace facepix;

namespace {

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

ap::MessageState random_state(int m, int frames, std::uint64_t seed) {
  Rng rng(seed);
  ap::MessageState st;
  st.frame_of.resize(m);
  st.segment_of.assign(m, 0);
  st.gid.resize(m);
  for (int i = 0; i < m; ++i) {
    st.frame_of[i] = static_cast<std::int64_t>(rng.uniform_int(frames));
    st.gid[i] = i;
  }
  st.S.resize(static_cast<std::size_t>(m) * m);
  st.R.assign(st.S.size(), 0.0);
  st.A.assign(st.S.size(), 0.0);
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < m; ++k)
      st.s(i, k) = (i == k) ? -0.5 : (st.frame_of[i] == st.frame_of[k] ? -1.0 : -rng.uniform());
  return st;
}

template <typename F>
double time_iters(F&& fn, int iters) {
  const double t0 = now_ms();
  for (int i = 0; i < iters; ++i) fn();
  return (now_ms() - t0) / iters;
}

void bench_messages(int m) {
  const int frames = m / 4 + 1;
  const int iters = 5;

  auto ref = random_state(m, frames, 7);
  const double t_ref = time_iters(
      [&] {
        ap::reference::update_responsibilities(ref, 0.5);
        ap::reference::update_availabilities(ref, 0.5);
      },
      m <= 800 ? iters : 1);

  auto serial = random_state(m, frames, 7);
  const double t_serial = time_iters(
      [&] {
        ap::update_responsibilities(serial, 0.5, false);
        ap::update_availabilities(serial, 0.5, false);
      },
      iters);

  auto par = random_state(m, frames, 7);
  const double t_par = time_iters(
      [&] {
        ap::update_responsibilities(par, 0.5, true);
        ap::update_availabilities(par, 0.5, true);
      },
      iters);

  double max_diff = 0.0;
  for (std::size_t i = 0; i < par.R.size(); ++i) {
    max_diff = std::max(max_diff, std::abs(par.R[i] - serial.R[i]));
    max_diff = std::max(max_diff, std::abs(par.A[i] - serial.A[i]));
  }

  std::printf("messages m=%-5d naive %9.2f ms   serial %8.2f ms   omp %8.2f ms   "
              "speedup %.2fx   serial-vs-omp max|diff| %.1e\n",
              m, t_ref, t_serial, t_par, t_serial / t_par, max_diff);
}

void bench_blur(int side) {
  Frame frame;
  frame.width = side;
  frame.height = side;
  frame.pixels.resize(static_cast<std::size_t>(side) * side * 3);
  Rng rng(11);
  for (auto& p : frame.pixels) p = static_cast<std::uint8_t>(rng.uniform_int(256));
  const BBox box{0, 0, static_cast<double>(side), static_cast<double>(side)};
  const double sigma = side / 24.0;
  const int radius = radius_for_sigma(sigma);

  Frame ref_frame = frame;
  const double t_ref = time_iters(
      [&] {
        Frame f = frame;
        reference::gaussian_blur_region(f, box, sigma, radius);
        ref_frame = f;
      },
      side <= 256 ? 3 : 1);

  Frame serial_frame = frame;
  const double t_serial = time_iters(
      [&] {
        Frame f = frame;
        gaussian_blur_region(f, box, sigma, radius, false);
        serial_frame = f;
      },
      3);

  Frame par_frame = frame;
  const double t_par = time_iters(
      [&] {
        Frame f = frame;
        gaussian_blur_region(f, box, sigma, radius, true);
        par_frame = f;
      },
      3);

  const bool ok = ref_frame.pixels == serial_frame.pixels && serial_frame.pixels == par_frame.pixels;
  std::printf("blur    n=%-5d direct %9.2f ms   serial %8.2f ms   omp %8.2f ms   "
              "speedup %.2fx   outputs %s\n",
              side, t_ref, t_serial, t_par, t_serial / t_par, ok ? "bit-identical" : "DIFFER");
}

}  // namespace

int main() {
  std::printf("threads: %d\n", omp_get_max_threads());
  for (int m : {200, 400, 800}) bench_messages(m);
  for (int side : {128, 256, 512}) bench_blur(side);
  return 0;
}
