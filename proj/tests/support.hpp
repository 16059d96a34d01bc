#pragma once

// Independent reference computations for the test suites. Nothing here calls
// the solver's minimizers, stage search or grid DP.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include "duostore/core.hpp"

namespace support {

using duostore::ProblemInstance;
using duostore::StorageUnit;
using duostore::Strategy;

inline double quad(double p, double lambda, double x) {
  return (p + lambda * p * x) * x;
}

// Grid scan with repeated zoom around the best cell.
inline double scan_argmin(const std::function<double(double)>& f, double lo,
                          double hi, int n = 2001, int rounds = 8) {
  double best = lo;
  for (int r = 0; r < rounds; ++r) {
    double fbest = std::numeric_limits<double>::infinity();
    const double h = (hi - lo) / (n - 1);
    for (int i = 0; i < n; ++i) {
      const double x = lo + h * i;
      const double v = f(x);
      if (v < fbest) {
        fbest = v;
        best = x;
      }
    }
    const double a = std::max(lo, best - 2 * h), b = std::min(hi, best + 2 * h);
    lo = a;
    hi = b;
  }
  return best;
}

struct BoxMin {
  double x1 = 0.0, x2 = 0.0, value = 0.0;
};

inline BoxMin scan_box(const std::function<double(double, double)>& f,
                       double P1, double P2, int n = 201, int rounds = 5) {
  double lo1 = -P1, hi1 = P1, lo2 = -P2, hi2 = P2;
  BoxMin best{0, 0, std::numeric_limits<double>::infinity()};
  for (int r = 0; r < rounds; ++r) {
    const double h1 = (hi1 - lo1) / (n - 1), h2 = (hi2 - lo2) / (n - 1);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double a = lo1 + h1 * i, b = lo2 + h2 * j;
        const double v = f(a, b);
        if (v < best.value) best = {a, b, v};
      }
    lo1 = std::max(-P1, best.x1 - 3 * h1);
    hi1 = std::min(P1, best.x1 + 3 * h1);
    lo2 = std::max(-P2, best.x2 - 3 * h2);
    hi2 = std::min(P2, best.x2 + 3 * h2);
  }
  return best;
}

// Exhaustive enumeration of level sequences on the grid {0, d, ..., E};
// exponential, for tiny T only.
inline double enumerate_single(const std::vector<double>& p, double lambda,
                               double E, double P, double s0, double sT,
                               double d) {
  const int T = static_cast<int>(p.size());
  const int n = static_cast<int>(std::lround(E / d));
  const int k = static_cast<int>(std::floor(P / d + 1e-9));
  const int i0 = static_cast<int>(std::lround(s0 / d));
  const int iT = static_cast<int>(std::lround(sT / d));
  double best = std::numeric_limits<double>::infinity();
  std::function<void(int, int, double)> walk = [&](int t, int i, double acc) {
    if (t == T) {
      if (i == iT) best = std::min(best, acc);
      return;
    }
    for (int s = std::max(0, i - k); s <= std::min(n, i + k); ++s) {
      if (std::abs(s - iT) > k * (T - t - 1)) continue;
      walk(t + 1, s, acc + quad(p[t], lambda, (s - i) * d));
    }
  };
  walk(0, i0, 0.0);
  return best;
}

// Uniform level at each step within what keeps the terminal reachable.
inline std::vector<double> random_levels(std::mt19937_64& rng, double E,
                                         double P, double s0, double sT,
                                         int T) {
  std::vector<double> s(T + 1);
  s[0] = s0;
  for (int t = 1; t < T; ++t) {
    const double lo =
        std::max({0.0, s[t - 1] - P, sT - (T - t) * P});
    const double hi =
        std::min({E, s[t - 1] + P, sT + (T - t) * P});
    s[t] = std::uniform_real_distribution<double>(lo, std::max(lo, hi))(rng);
  }
  s[T] = sT;
  return s;
}

inline Strategy random_strategy(std::mt19937_64& rng,
                                const ProblemInstance& inst) {
  const int T = inst.horizon();
  return {random_levels(rng, inst.unit1.capacity, inst.unit1.rate,
                        inst.initial_levels[0], inst.final_levels[0], T),
          random_levels(rng, inst.unit2.capacity, inst.unit2.rate,
                        inst.initial_levels[1], inst.final_levels[1], T)};
}

inline double uniform(std::mt19937_64& rng, double a, double b) {
  return std::uniform_real_distribution<double>(a, b)(rng);
}

inline std::vector<double> random_prices(std::mt19937_64& rng, int T,
                                         double lo = 10.0, double hi = 100.0) {
  std::vector<double> p(T);
  for (double& v : p) v = uniform(rng, lo, hi);
  return p;
}

// Reachable boundary pair for one unit.
inline std::pair<double, double> random_boundary(std::mt19937_64& rng,
                                                 double E, double P, int T) {
  const double s0 = uniform(rng, 0.0, E);
  double sT = uniform(rng, 0.0, E);
  sT = std::clamp(sT, s0 - P * T, s0 + P * T);
  return {s0, sT};
}

// Rates in [0.5, 2], E/P ratios in [1, 12] at least 2% apart, random
// reachable boundary levels and lambda (P1 + P2) in [0.01, 0.4]. Units are
// returned in solver order (larger ratio first).
inline ProblemInstance random_instance(std::mt19937_64& rng, int T) {
  const double P1 = uniform(rng, 0.5, 2.0), P2 = uniform(rng, 0.5, 2.0);
  double r1 = uniform(rng, 1.0, 12.0), r2 = uniform(rng, 1.0, 12.0);
  while (std::abs(r1 - r2) < 0.02 * std::max(r1, r2))
    r2 = uniform(rng, 1.0, 12.0);
  StorageUnit a{r1 * P1, P1}, b{r2 * P2, P2};
  if (r2 > r1) std::swap(a, b);
  const double lambda = uniform(rng, 0.01, 0.4) / (P1 + P2);
  const auto [a0, aT] = random_boundary(rng, a.capacity, a.rate, T);
  const auto [b0, bT] = random_boundary(rng, b.capacity, b.rate, T);
  return duostore::make_instance(
      a, b,
      duostore::CostModel::quadratic_impact(random_prices(rng, T), lambda),
      {a0, b0}, {aT, bT});
}

// Instance whose capacities, rates and boundary levels sit on the grids
// delta_j = E_j / 100: P_j = k_j delta_j with distinct k_j in [9, 60].
inline ProblemInstance grid_instance(std::mt19937_64& rng, int T) {
  std::uniform_int_distribution<int> kd(9, 60), ld(0, 100);
  const int k1 = kd(rng);
  int k2 = kd(rng);
  while (k2 == k1) k2 = kd(rng);
  const double E1 = uniform(rng, 1.0, 10.0), E2 = uniform(rng, 1.0, 10.0);
  StorageUnit a{E1, k1 * E1 / 100.0}, b{E2, k2 * E2 / 100.0};
  int ka = k1, kb = k2;
  if (b.ratio() > a.ratio()) {
    std::swap(a, b);
    std::swap(ka, kb);
  }
  auto levels = [&](int k) {
    const int i0 = ld(rng);
    int iT = ld(rng);
    iT = std::clamp(iT, i0 - k * T, i0 + k * T);
    return std::pair{i0, iT};
  };
  const auto [a0, aT] = levels(ka);
  const auto [b0, bT] = levels(kb);
  const double lambda = uniform(rng, 0.01, 0.4) / (a.rate + b.rate);
  return duostore::make_instance(
      a, b,
      duostore::CostModel::quadratic_impact(random_prices(rng, T), lambda),
      {a0 * a.capacity / 100.0, b0 * b.capacity / 100.0},
      {aT * a.capacity / 100.0, bT * b.capacity / 100.0});
}

// Equal E/P ratio with boundary levels split in proportion to capacity.
inline ProblemInstance equal_ratio_instance(std::mt19937_64& rng, int T) {
  const double r = uniform(rng, 1.0, 12.0);
  const double P1 = uniform(rng, 0.5, 2.0), P2 = uniform(rng, 0.5, 2.0);
  StorageUnit a{r * P1, P1}, b{r * P2, P2};
  const double E = a.capacity + b.capacity;
  const double alpha = a.capacity / E;
  const auto [s0, sT] = random_boundary(rng, E, P1 + P2, T);
  const double lambda = uniform(rng, 0.01, 0.4) / (P1 + P2);
  return duostore::make_instance(
      a, b,
      duostore::CostModel::quadratic_impact(random_prices(rng, T), lambda),
      {alpha * s0, (1 - alpha) * s0}, {alpha * sT, (1 - alpha) * sT});
}

}  // namespace support
