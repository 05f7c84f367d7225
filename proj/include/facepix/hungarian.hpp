#pragma once

#include <span>
#include <utility>
#include <vector>

#include "facepix/types.hpp"

namespace facepix {

// Cost charged for leaving a row/column unmatched (and for infeasible
// pairs). Strictly above any feasible 1-IoU cost, so minimizing total cost
// first maximizes the number of feasible matches.
inline constexpr double kUnmatchedCost = 10.0;

// Minimum-cost perfect assignment on a square cost matrix (augmenting-path
// Hungarian with potentials, O(n^3)). Returns row -> column.
std::vector<int> solve_assignment(const std::vector<std::vector<double>>& cost);

// Builds the square matrix used for IoU matching: entry = 1-iou where
// iou >= floor, kUnmatchedCost otherwise (including padding).
std::vector<std::vector<double>> iou_cost_matrix(std::span<const BBox> rows, std::span<const BBox> cols,
                                                 double iou_floor);

struct BoxMatch {
  std::vector<std::pair<int, int>> pairs;  // (row index, col index), feasible only
  std::vector<int> unmatched_rows;
  std::vector<int> unmatched_cols;
  double total_cost = 0.0;  // over the full square matrix, for oracle checks
};

// One-to-one IoU matching; pairs with IoU below `iou_floor` never match.
BoxMatch match_boxes(std::span<const BBox> rows, std::span<const BBox> cols, double iou_floor);

}  // namespace facepix
