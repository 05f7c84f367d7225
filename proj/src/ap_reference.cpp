#include <algorithm>
#include <cmath>
#include <limits>

#include "facepix/ap_cluster.hpp"

// Direct transcriptions of the message-update formulas, one term at a time.
// Slow on purpose; the optimized passes are checked against these.

namespace facepix::ap::reference {

void update_responsibilities(MessageState& st, double damping) {
  const int m = st.dim();
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < m; ++k) {
      double competing = -std::numeric_limits<double>::infinity();
      for (int kp = 0; kp < m; ++kp) {
        if (kp == k) continue;
        competing = std::max(competing, st.a(i, kp) + st.s(i, kp));
      }
      const double fresh = std::isinf(competing) ? st.s(i, k) : st.s(i, k) - competing;
      st.r(i, k) = damping * st.r(i, k) + (1.0 - damping) * fresh;
    }
  }
}

void update_availabilities(MessageState& st, double damping) {
  const int m = st.dim();
  std::vector<double> fresh(static_cast<std::size_t>(m) * m, 0.0);
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < m; ++k) {
      if (i == k) {
        double sum = 0.0;
        for (int ip = 0; ip < m; ++ip)
          if (ip != k) sum += std::max(0.0, st.r(ip, k));
        fresh[static_cast<std::size_t>(i) * m + k] = sum;
        continue;
      }
      double sum = st.r(k, k);
      for (int ip = 0; ip < m; ++ip) {
        if (ip == i || ip == k) continue;
        const double pos = std::max(0.0, st.r(ip, k));
        if (st.frame_of[ip] == st.frame_of[i])
          sum -= pos;  // same-frame peers of i repel
        else
          sum += pos;
      }
      fresh[static_cast<std::size_t>(i) * m + k] = std::min(0.0, sum);
    }
  }
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < m; ++k)
      st.a(i, k) = damping * st.a(i, k) + (1.0 - damping) * fresh[static_cast<std::size_t>(i) * m + k];
}

}  // namespace facepix::ap::reference
