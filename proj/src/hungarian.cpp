#include "facepix/hungarian.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace facepix {

std::vector<int> solve_assignment(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  if (n == 0) return {};
  for (const auto& row : cost)
    if (static_cast<int>(row.size()) != n) throw std::invalid_argument("cost matrix must be square");

  const double inf = std::numeric_limits<double>::infinity();
  // 1-based potentials; way[j] remembers the augmenting path
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }

  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j)
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

std::vector<std::vector<double>> iou_cost_matrix(std::span<const BBox> rows, std::span<const BBox> cols,
                                                 double iou_floor) {
  const int n = static_cast<int>(rows.size());
  const int m = static_cast<int>(cols.size());
  const int s = std::max(n, m);
  std::vector<std::vector<double>> cost(s, std::vector<double>(s, kUnmatchedCost));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      const double overlap = iou(rows[i], cols[j]);
      if (overlap >= iou_floor) cost[i][j] = 1.0 - overlap;
    }
  }
  return cost;
}

BoxMatch match_boxes(std::span<const BBox> rows, std::span<const BBox> cols, double iou_floor) {
  BoxMatch out;
  const int n = static_cast<int>(rows.size());
  const int m = static_cast<int>(cols.size());
  if (n == 0 && m == 0) return out;
  const auto cost = iou_cost_matrix(rows, cols, iou_floor);
  const auto assignment = solve_assignment(cost);

  std::vector<char> col_matched(m, false);
  for (int i = 0; i < static_cast<int>(assignment.size()); ++i) {
    const int j = assignment[i];
    if (j >= 0) out.total_cost += cost[i][j];
    if (i < n && j >= 0 && j < m && cost[i][j] < kUnmatchedCost) {
      out.pairs.emplace_back(i, j);
      col_matched[j] = true;
    } else if (i < n) {
      out.unmatched_rows.push_back(i);
    }
  }
  for (int j = 0; j < m; ++j)
    if (!col_matched[j]) out.unmatched_cols.push_back(j);
  return out;
}

}  // namespace facepix
