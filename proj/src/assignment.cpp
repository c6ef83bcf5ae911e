#include "siteguard/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace siteguard {

namespace {

struct Solution {
  std::vector<int> row_to_col;
  std::vector<double> u, v;  // dual potentials, rows / columns
};

// Kuhn-Munkres with potentials on a dense square matrix.
Solution hungarian_square(const std::vector<double>& a, int n) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  auto at = [&](int i, int j) { return a[static_cast<std::size_t>(i - 1) * n + (j - 1)]; };
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = at(i0, j) - u[i0] - v[j];
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
    } while (j0 != 0);
  }
  Solution s;
  s.row_to_col.assign(n, -1);
  for (int j = 1; j <= n; ++j)
    if (p[j] != 0) s.row_to_col[p[j] - 1] = j - 1;
  s.u.assign(u.begin() + 1, u.end());
  s.v.assign(v.begin() + 1, v.end());
  return s;
}

// Rewrites an optimal matching into the lexicographically smallest optimal
// one. Optimal matchings are exactly the perfect matchings on tight edges
// (zero reduced cost) of the final duals, so each row in turn tries its
// smallest tight column and repairs the rest by an alternating path.
void lexicographic_refine(const std::vector<double>& a, int n, Solution& s, double eps) {
  auto tight = [&](int i, int j) {
    return std::abs(a[static_cast<std::size_t>(i) * n + j] - s.u[i] - s.v[j]) <= eps;
  };
  std::vector<int> col_to_row(n, -1);
  for (int i = 0; i < n; ++i) col_to_row[s.row_to_col[i]] = i;
  std::vector<char> fixed_col(n, 0);

  for (int i = 0; i < n; ++i) {
    const int current = s.row_to_col[i];
    for (int j = 0; j < n; ++j) {
      if (j == current) break;
      if (fixed_col[j] || !tight(i, j)) continue;
      // Row i takes j; its owner must reach `current` through rows > i.
      const int start = col_to_row[j];
      std::vector<int> parent_col(n, -1);  // for each reached row: column it was reached through
      std::vector<char> seen_col(n, 0), seen_row(n, 0);
      seen_col[j] = 1;
      std::deque<int> queue{start};
      seen_row[start] = 1;
      parent_col[start] = j;
      int end_row = -1;
      std::vector<int> via_row(n, -1);  // column -> row that discovered it
      while (!queue.empty() && end_row < 0) {
        const int r = queue.front();
        queue.pop_front();
        for (int c = 0; c < n; ++c) {
          if (seen_col[c] || fixed_col[c] || !tight(r, c)) continue;
          seen_col[c] = 1;
          via_row[c] = r;
          if (c == current) {
            end_row = r;
            break;
          }
          const int next = col_to_row[c];
          if (next <= i || seen_row[next]) continue;
          seen_row[next] = 1;
          parent_col[next] = c;
          queue.push_back(next);
        }
      }
      if (end_row < 0) continue;
      // Walk back from `current`, shifting each row onto the column that
      // discovered it.
      int c = current;
      while (true) {
        const int r = via_row[c];
        const int prev_col = parent_col[r];
        s.row_to_col[r] = c;
        col_to_row[c] = r;
        if (prev_col == j) break;
        c = prev_col;
      }
      s.row_to_col[i] = j;
      col_to_row[j] = i;
      break;
    }
    fixed_col[s.row_to_col[i]] = 1;
  }
}

}  // namespace

Assignment solve_assignment(const Eigen::MatrixXd& cost) {
  const int k = static_cast<int>(cost.rows());
  const int m = static_cast<int>(cost.cols());
  if (k == 0 || m == 0) return {};
  const int n = std::max(k, m);

  double max_abs = 0.0;
  for (int r = 0; r < k; ++r)
    for (int c = 0; c < m; ++c)
      if (std::isfinite(cost(r, c))) max_abs = std::max(max_abs, std::abs(cost(r, c)));
  // Forbidden entries get a finite cost exceeding any rearrangement of the
  // finite ones, so optimal solutions first minimize the forbidden count.
  // Dummy rows/columns cost 0: every complete matching uses the same number
  // of them, so their value never affects which real pairs are chosen.
  const double forbidden = (n + 1) * 2.0 * std::max(max_abs, 1.0) + 1.0;

  std::vector<double> a(static_cast<std::size_t>(n) * n, 0.0);
  for (int r = 0; r < k; ++r)
    for (int c = 0; c < m; ++c) {
      const double x = cost(r, c);
      a[static_cast<std::size_t>(r) * n + c] = std::isfinite(x) ? x : forbidden;
    }

  Solution s = hungarian_square(a, n);
  double scale = 1.0;
  for (double x : a) scale = std::max(scale, std::abs(x));
  lexicographic_refine(a, n, s, 1e-11 * scale);

  Assignment out;
  for (int r = 0; r < k; ++r) {
    const int c = s.row_to_col[r];
    if (c < m && std::isfinite(cost(r, c))) out.emplace_back(r, c);
  }
  return out;
}

double assignment_cost(const Eigen::MatrixXd& cost, const Assignment& a) {
  double total = 0.0;
  for (const auto& [r, c] : a) total += cost(r, c);
  return total;
}

}  // namespace siteguard
