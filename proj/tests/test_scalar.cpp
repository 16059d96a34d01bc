#include "doctest.h"
#include "duostore/scalar.hpp"
#include "support.hpp"

#include <random>

using namespace duostore;

namespace {

const CostModel kFifty = CostModel::quadratic_impact({50.0}, 0.001);
const CostModel kMarket = CostModel::quadratic_impact({50.0}, 5e-5);

double scan_single(double p, double lambda, double P, double mu) {
  return support::scan_argmin(
      [&](double x) { return support::quad(p, lambda, x) - mu * x; }, -P, P);
}

}  // namespace

TEST_CASE("single minimizer examples") {
  CHECK(xhat_single(kFifty, 1, 50, 50, 1e-12) == doctest::Approx(0.0));
  CHECK(xhat_single(kFifty, 1, 60, 50, 1e-12) == doctest::Approx(50.0));
  CHECK(xhat_single(kFifty, 1, 52, 50, 1e-12) == doctest::Approx(20.0));
  CHECK(scan_single(50, 0.001, 50, 60) == doctest::Approx(50.0).epsilon(1e-6));
  CHECK(scan_single(50, 0.001, 50, 52) == doctest::Approx(20.0).epsilon(1e-6));
}

TEST_CASE("single minimizer matches a grid scan and is monotone") {
  std::mt19937_64 rng(21);
  for (int rep = 0; rep < 100; ++rep) {
    const double p = support::uniform(rng, 10, 100);
    const double P = support::uniform(rng, 0.5, 3);
    const double lambda = support::uniform(rng, 0.01, 0.45) / P;
    auto c = CostModel::quadratic_impact({p}, lambda);
    const double mu = support::uniform(rng, 0.5 * p, 1.8 * p);
    CHECK(xhat_single(c, 1, mu, P, 1e-12) ==
          doctest::Approx(scan_single(p, lambda, P, mu)).epsilon(1e-6).scale(P));
    const double mu2 = mu + support::uniform(rng, 0, 5);
    CHECK(xhat_single(c, 1, mu, P, 1e-12) <= xhat_single(c, 1, mu2, P, 1e-12));
    CHECK(xhat_single(c, 1, p * (1 + 2 * lambda * P), P, 1e-12) == doctest::Approx(P));
    CHECK(xhat_single(c, 1, p * (1 - 2 * lambda * P), P, 1e-12) == doctest::Approx(-P));
  }
}

TEST_CASE("tie segment examples") {
  auto z = tie_segment(kMarket, 1, 50, 500, 2000, 1e-9);
  CHECK(z.gamma_star == doctest::Approx(0.0).scale(1));
  CHECK(z.x1_min == doctest::Approx(-500));
  CHECK(z.x1_max == doctest::Approx(500));

  auto s = tie_segment(kMarket, 1, 52, 500, 2000, 1e-9);
  const double gamma = support::scan_argmin(
      [](double x) { return support::quad(50, 5e-5, x) - 52 * x; }, -2500, 2500);
  CHECK(gamma == doctest::Approx(400).epsilon(1e-6));
  CHECK(s.gamma_star == doctest::Approx(400));
  CHECK(s.x1_min == doctest::Approx(-500));
  CHECK(s.x1_max == doctest::Approx(500));

  auto big = tie_segment(kMarket, 1, 1e6, 500, 2000, 1e-9);
  CHECK(big.gamma_star == doctest::Approx(2500));
  CHECK(big.x1_min == doctest::Approx(500));
  CHECK(big.x1_max == doctest::Approx(500));
}

TEST_CASE("pair minimizer examples") {
  auto mid = xhat_pair(kMarket, 1, {50, {50, 0.5}}, 500, 2000, 1e-9);
  CHECK(mid.x1 == doctest::Approx(0).scale(1));
  CHECK(mid.x2 == doctest::Approx(0).scale(1));

  auto split = xhat_pair(kMarket, 1, {53, {51, 0.3}}, 500, 2000, 1e-9);
  CHECK(split.x1 == doctest::Approx(500));
  CHECK(split.x2 == doctest::Approx(-300));
  const auto grid = support::scan_box(
      [](double a, double b) {
        return support::quad(50, 5e-5, a + b) - 53 * a - 51 * b;
      },
      500, 2000);
  CHECK(grid.x1 == doctest::Approx(500).epsilon(1e-4));
  CHECK(grid.x2 == doctest::Approx(-300).epsilon(1e-4));

  auto k0 = xhat_pair(kMarket, 1, {52, {52, 0.0}}, 500, 2000, 1e-9);
  CHECK(k0.x1 == doctest::Approx(500));
  CHECK(k0.x2 == doctest::Approx(-100));
  auto k1 = xhat_pair(kMarket, 1, {52, {52, 1.0}}, 500, 2000, 1e-9);
  CHECK(k1.x1 == doctest::Approx(-500));
  CHECK(k1.x2 == doctest::Approx(900));
}

TEST_CASE("pair minimizer beats a 201 x 201 grid of the box") {
  std::mt19937_64 rng(8);
  for (int rep = 0; rep < 200; ++rep) {
    const double p = support::uniform(rng, 10, 100);
    const double P1 = support::uniform(rng, 0.5, 2), P2 = support::uniform(rng, 0.5, 2);
    const double lambda = support::uniform(rng, 0.01, 0.45) / (P1 + P2);
    auto c = CostModel::quadratic_impact({p}, lambda);
    const double m1 = support::uniform(rng, 0.3 * p, 1.7 * p);
    const double m2 = support::uniform(rng, 0.3 * p, 1.7 * p);
    const auto x = xhat_pair(c, 1, {m1, {m2, 0.5}}, P1, P2, 1e-12);
    double gmin = 1e300;
    for (int i = 0; i < 201; ++i)
      for (int j = 0; j < 201; ++j) {
        const double a = -P1 + 2 * P1 * i / 200.0, b = -P2 + 2 * P2 * j / 200.0;
        gmin = std::min(gmin, support::quad(p, lambda, a + b) - m1 * a - m2 * b);
      }
    CHECK(pair_objective(c, 1, m1, m2, x.x1, x.x2) <= gmin + 1e-9 * p * (P1 + P2));
  }
}

TEST_CASE("tie interpolation keeps the sum and moves unit 2 up") {
  std::mt19937_64 rng(9);
  for (int rep = 0; rep < 50; ++rep) {
    const double p = support::uniform(rng, 10, 100);
    const double P1 = support::uniform(rng, 0.5, 2), P2 = support::uniform(rng, 0.5, 2);
    auto c = CostModel::quadratic_impact({p}, 0.3 / (P1 + P2));
    const double mu = support::uniform(rng, 0.7 * p, 1.3 * p);
    const auto seg = tie_segment(c, 1, mu, P1, P2, 1e-12);
    double prev = -1e300;
    for (int k = 0; k <= 10; ++k) {
      const auto x = xhat_pair(c, 1, {mu, {mu, k / 10.0}}, P1, P2, 1e-12);
      CHECK(x.x1 + x.x2 == doctest::Approx(seg.gamma_star));
      CHECK(x.x2 >= prev - 1e-12);
      prev = x.x2;
    }
  }
}

TEST_CASE("unit 2 increment is monotone in the lexicographic order") {
  std::mt19937_64 rng(10);
  for (int rep = 0; rep < 50; ++rep) {
    const double p = support::uniform(rng, 10, 100);
    const double P1 = support::uniform(rng, 0.5, 2), P2 = support::uniform(rng, 0.5, 2);
    auto c = CostModel::quadratic_impact({p}, 0.3 / (P1 + P2));
    const double mu1 = support::uniform(rng, 0.7 * p, 1.3 * p);
    std::vector<SecondParam> ladder;
    for (int i = 0; i <= 40; ++i) ladder.push_back({mu1 - 0.4 * p + 0.01 * p * i, 0.0});
    for (int k = 0; k <= 10; ++k) ladder.push_back({mu1, k / 10.0});
    for (int i = 1; i <= 40; ++i) ladder.push_back({mu1 + 0.01 * p * i, 1.0});
    std::sort(ladder.begin(), ladder.end());
    double prev = -1e300;
    for (const auto& nu : ladder) {
      const double x2 = xhat_pair(c, 1, {mu1, nu}, P1, P2, 1e-12).x2;
      CHECK(x2 >= prev - 1e-12);
      prev = x2;
    }
  }
}

TEST_CASE("saturation bracket saturates") {
  auto c = CostModel::quadratic_impact({10, 40, 90}, 0.1);
  const auto b = saturation_bracket(c, 1.5);
  for (int t = 1; t <= 3; ++t) {
    CHECK(xhat_single(c, t, b.lo, 1.5, 1e-12) == doctest::Approx(-1.5));
    CHECK(xhat_single(c, t, b.hi, 1.5, 1e-12) == doctest::Approx(1.5));
  }
}
