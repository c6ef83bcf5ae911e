#pragma once

#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace siteguard {

inline constexpr double kInfiniteCost = std::numeric_limits<double>::infinity();

using Assignment = std::vector<std::pair<int, int>>;

// Minimum-cost assignment for a K x M matrix whose entries may be +inf
// (forbidden). The matrix is padded square with dummy rows/columns and solved
// exactly by Kuhn-Munkres; pairs landing on forbidden entries or dummies are
// dropped. Among optimal solutions the lexicographically smallest (row ->
// column) one is returned. Output is sorted by row.
Assignment solve_assignment(const Eigen::MatrixXd& cost);

double assignment_cost(const Eigen::MatrixXd& cost, const Assignment& a);

}  // namespace siteguard
