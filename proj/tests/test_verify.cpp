#include "doctest.h"
#include "duostore/duo.hpp"
#include "duostore/verify.hpp"
#include "support.hpp"

#include <cmath>
#include <random>

using namespace duostore;

namespace {

ProblemInstance hand_pair() {
  // Unit 2 is tiny so the pair behaves like the single-unit hand case.
  return make_instance({1, 1}, {0.25, 0.25},
                       CostModel::quadratic_impact({10, 20}, 0.01), {0, 0}, {0, 0});
}

}  // namespace

TEST_CASE("single-unit hand case certifies and the grid finds -9.7") {
  const auto pr =
      make_single({1, 1}, CostModel::quadratic_impact({10, 20}, 0.01), 0, 0);
  const auto s = solve_single(pr);
  CHECK(certify_single(s.levels, s.multipliers, pr).overall);
  const auto dp = oracle_dp_single(pr, 0.25);
  CHECK(dp.cost == doctest::Approx(-9.7).epsilon(1e-12));
  CHECK(dp.levels == std::vector<double>{0, 1, 0});
  CHECK(support::enumerate_single({10, 20}, 0.01, 1, 1, 0, 0, 0.25) ==
        doctest::Approx(-9.7));
}

TEST_CASE("a wrong multiplier breaks the minimization condition") {
  const auto pr =
      make_single({1, 1}, CostModel::quadratic_impact({10, 20}, 0.01), 0, 0);
  const auto s = solve_single(pr);
  // mu_1 = 7.2 would sell in hour 1 instead of buying.
  auto bad = s.multipliers;
  bad[0] -= 3;
  auto c = certify_single(s.levels, bad, pr);
  CHECK(!c.minimization_ok);
  CHECK(!c.overall);
  // mu_2 = 7.2 still sells in hour 2 but falls while the unit is full.
  bad = s.multipliers;
  bad[1] -= 3;
  c = certify_single(s.levels, bad, pr);
  CHECK(c.minimization_ok);
  CHECK(!c.slackness_ok);
  CHECK(!c.overall);
}

TEST_CASE("infeasible strategy fails condition (i)") {
  auto inst = hand_pair();
  Strategy s{{0, 1.5, 0}, {0, 0, 0}};
  MultiplierPath m{{10, 10}, {{10, 0}, {10, 0}}};
  const auto c = certify(s, m, inst, inst.tolerances);
  CHECK(!c.feasible);
  CHECK(c.max_violation == doctest::Approx(0.5));
}

TEST_CASE("slackness direction at the boundaries") {
  auto inst = make_instance({2, 1}, {1, 1},
                            CostModel::quadratic_impact({10, 20, 30}, 0.01), {0, 0},
                            {0, 0});
  Strategy s{{0, 0, 0, 0}, {0, 0, 0, 0}};
  MultiplierPath down{{12, 11, 10}, {{12, 0}, {11, 0}, {10, 0}}};
  auto c = certify(s, down, inst, inst.tolerances);
  CHECK(c.slackness_ok);  // empty allows mu to fall
  MultiplierPath up{{10, 11, 12}, {{10, 0}, {11, 0}, {12, 0}}};
  c = certify(s, up, inst, inst.tolerances);
  CHECK(!c.slackness_ok);
  CHECK(c.slackness_violations.size() == 4);
}

TEST_CASE("a passing certificate beats random feasible strategies") {
  std::mt19937_64 rng(404);
  int certified = 0;
  for (int rep = 0; rep < 20; ++rep) {
    auto inst = support::random_instance(rng, 4 + rep);
    const auto r = solve_two(inst);
    if (!r.certificate.overall) continue;
    ++certified;
    for (int k = 0; k < 100; ++k) {
      const auto s = support::random_strategy(rng, inst);
      CHECK(r.cost <= total_cost(s, inst) + inst.tolerances.eps_cost);
    }
  }
  CHECK(certified > 8);
}

TEST_CASE("joint oracle on the hand pair") {
  auto inst = hand_pair();
  const auto dp = oracle_dp(inst, 0.25, 0.25);
  // Both units can shift energy; the grid optimum is at most the single-unit
  // value and is checked against brute enumeration of the aggregate.
  CHECK(dp.cost <= -9.7 + 1e-12);
  const double agg = support::enumerate_single({10, 20}, 0.01, 1.25, 1.25, 0, 0, 0.25);
  CHECK(dp.cost == doctest::Approx(agg));
}

TEST_CASE("zero-trade instance costs nothing on the grid") {
  auto inst = make_instance({1, 1}, {1, 0.5},
                            CostModel::quadratic_impact({5}, 0.01), {0.5, 0.5}, {0.5, 0.5});
  CHECK(oracle_dp(inst, 0.25, 0.25).cost == 0.0);
}

TEST_CASE("grid refinement never raises the oracle cost") {
  std::mt19937_64 rng(55);
  for (int rep = 0; rep < 5; ++rep) {
    auto inst = support::grid_instance(rng, 4);
    const double e1 = inst.unit1.capacity, e2 = inst.unit2.capacity;
    // Round the boundary levels onto the coarse grid.
    inst.initial_levels = {std::round(inst.initial_levels[0] / e1 * 50) * e1 / 50,
                           std::round(inst.initial_levels[1] / e2 * 50) * e2 / 50};
    inst.final_levels = inst.initial_levels;
    const double coarse = oracle_dp(inst, e1 / 50, e2 / 50).cost;
    const double fine = oracle_dp(inst, e1 / 100, e2 / 100).cost;
    CHECK(fine <= coarse + 1e-12);
  }
}

TEST_CASE("joint oracle agrees with brute enumeration when one unit is frozen") {
  std::mt19937_64 rng(66);
  for (int rep = 0; rep < 5; ++rep) {
    const auto p = support::random_prices(rng, 4);
    // Unit 2 has rate below the grid step, so it cannot move.
    auto inst = make_instance({2, 1}, {1, 0.1},
                              CostModel::quadratic_impact(p, 0.1), {1, 0.5}, {0.5, 0.5});
    const double dp = oracle_dp(inst, 0.25, 0.5).cost;
    CHECK(dp == doctest::Approx(support::enumerate_single(p, 0.1, 2, 1, 1, 0.5, 0.25)));
  }
}

TEST_CASE("budget refusal names the required work") {
  std::mt19937_64 rng(1);
  auto inst = support::grid_instance(rng, 6);
  try {
    oracle_dp(inst, inst.unit1.capacity / 100, inst.unit2.capacity / 100, 1000);
    FAIL("expected refusal");
  } catch (const BudgetExceeded& e) {
    CHECK(e.required() > 1000);
  }
}

TEST_CASE("off-grid levels are rejected") {
  auto inst = make_instance({1, 1}, {1, 0.5},
                            CostModel::quadratic_impact({5, 6}, 0.01), {0.3, 0}, {0.3, 0});
  CHECK_THROWS_AS(oracle_dp(inst, 0.25, 0.25), std::invalid_argument);
}

TEST_CASE("gap report") {
  auto inst = hand_pair();
  const auto dp = oracle_dp(inst, 0.25, 0.25);
  const auto r = solve(inst);
  const auto g = compare(r.cost, dp, inst);
  CHECK(g.beats_grid);
  CHECK(g.within_bound);
  CHECK(g.bound == doctest::Approx(20 * (1 + 2 * 0.01 * 1.25) * 0.25 * 2));
}
