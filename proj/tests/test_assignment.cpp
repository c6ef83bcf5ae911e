#include <doctest.h>

#include <random>
#include <set>

#include "siteguard/assignment.hpp"
#include "support.hpp"

using namespace siteguard;
using namespace testing;

namespace {

Eigen::MatrixXd random_matrix(std::mt19937_64& rng, int rows, int cols, double inf_fraction) {
  std::uniform_real_distribution<double> value(0.0, 100.0), coin(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = coin(rng) < inf_fraction ? kInfiniteCost : value(rng);
  return m;
}

void check_against_brute_force(const Eigen::MatrixXd& m) {
  const Assignment a = solve_assignment(m);
  const auto [forbidden, best] = brute_force_assignment(m);
  const int full = static_cast<int>(std::min(m.rows(), m.cols()));
  CHECK(static_cast<int>(a.size()) == full - forbidden);
  CHECK(assignment_cost(m, a) == doctest::Approx(best).epsilon(1e-10));
  std::set<int> rows, cols;
  for (const auto& [r, c] : a) {
    CHECK(std::isfinite(m(r, c)));
    CHECK(rows.insert(r).second);
    CHECK(cols.insert(c).second);
  }
  CHECK(std::is_sorted(a.begin(), a.end()));
}

}  // namespace

TEST_SUITE("assignment") {
  TEST_CASE("diagonal two by two") {
    Eigen::MatrixXd m(2, 2);
    m << 0, 5, 5, 0;
    const Assignment a = solve_assignment(m);
    CHECK(a == Assignment{{0, 0}, {1, 1}});
    CHECK(assignment_cost(m, a) == 0.0);
  }

  TEST_CASE("empty dimensions give an empty assignment") {
    CHECK(solve_assignment(Eigen::MatrixXd(1, 0)).empty());
    CHECK(solve_assignment(Eigen::MatrixXd(0, 3)).empty());
    CHECK(solve_assignment(Eigen::MatrixXd(0, 0)).empty());
  }

  TEST_CASE("forbidden entries are never assigned") {
    Eigen::MatrixXd m(2, 2);
    m << kInfiniteCost, 1, kInfiniteCost, 2;
    const Assignment a = solve_assignment(m);
    REQUIRE(a.size() == 1);
    CHECK(a[0] == std::pair{0, 1});

    Eigen::MatrixXd all(2, 3);
    all.setConstant(kInfiniteCost);
    CHECK(solve_assignment(all).empty());
  }

  TEST_CASE("the forbidden count is minimized before the cost") {
    // Pairing (0,0),(1,1) costs 1000 + 1000, but the cheaper (0,1) alone would
    // leave row 1 stranded.
    Eigen::MatrixXd m(2, 2);
    m << 1000, 1, 1000, kInfiniteCost;
    const Assignment a = solve_assignment(m);
    CHECK(a == Assignment{{0, 1}, {1, 0}});
  }

  TEST_CASE("random square matrices match brute force") {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 200; ++trial) check_against_brute_force(random_matrix(rng, 5, 5, 0.0));
  }

  TEST_CASE("rectangular matrices match brute force") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 200; ++trial) {
      std::uniform_int_distribution<int> dim(1, 6);
      check_against_brute_force(random_matrix(rng, dim(rng), dim(rng), 0.0));
    }
  }

  TEST_CASE("matrices with forbidden entries match brute force") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 300; ++trial) {
      std::uniform_int_distribution<int> dim(1, 6);
      check_against_brute_force(random_matrix(rng, dim(rng), dim(rng), 0.4));
    }
  }

  TEST_CASE("huge finite costs keep exact optimality") {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 50; ++trial) {
      Eigen::MatrixXd m = random_matrix(rng, 4, 5, 0.3) * 1e9;
      check_against_brute_force(m);
    }
  }

  TEST_CASE("ties resolve to the lexicographically smallest assignment") {
    Eigen::MatrixXd flat = Eigen::MatrixXd::Constant(3, 3, 1.0);
    CHECK(solve_assignment(flat) == Assignment{{0, 0}, {1, 1}, {2, 2}});

    Eigen::MatrixXd m(3, 3);
    m << 2, 1, 1, 1, 2, 1, 1, 1, 2;
    // Optimal cost 3 is reached by (0,1),(1,2),(2,0) and (0,2),(1,0),(2,1).
    CHECK(solve_assignment(m) == Assignment{{0, 1}, {1, 2}, {2, 0}});

    Eigen::MatrixXd wide = Eigen::MatrixXd::Zero(2, 4);
    CHECK(solve_assignment(wide) == Assignment{{0, 0}, {1, 1}});

    Eigen::MatrixXd tall = Eigen::MatrixXd::Zero(4, 2);
    CHECK(solve_assignment(tall) == Assignment{{0, 0}, {1, 1}});
  }

  TEST_CASE("tie refinement agrees with exhaustive lexicographic search") {
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<int> small(0, 2), dim(1, 5);
    for (int trial = 0; trial < 200; ++trial) {
      const int rows = dim(rng), cols = dim(rng);
      Eigen::MatrixXd m(rows, cols);
      for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m(r, c) = small(rng);
      // Exhaustive: enumerate injective maps of the smaller side, keep the best
      // cost and, among those, the smallest sorted pair list.
      const bool flip = rows > cols;
      const int k = flip ? cols : rows, n = flip ? rows : cols;
      std::vector<int> perm(n);
      std::iota(perm.begin(), perm.end(), 0);
      double best = std::numeric_limits<double>::infinity();
      Assignment best_a;
      do {
        Assignment a;
        double s = 0.0;
        for (int i = 0; i < k; ++i) {
          const int r = flip ? perm[i] : i, c = flip ? i : perm[i];
          a.emplace_back(r, c);
          s += m(r, c);
        }
        std::sort(a.begin(), a.end());
        if (s < best - 1e-12 || (std::abs(s - best) <= 1e-12 && a < best_a)) {
          best = s;
          best_a = a;
        }
      } while (std::next_permutation(perm.begin(), perm.end()));
      CHECK(solve_assignment(m) == best_a);
    }
  }
}
