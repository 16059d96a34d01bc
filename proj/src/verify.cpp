#include "duostore/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <string>
#include <thread>

namespace duostore {

namespace {

constexpr int kGridPoints = 201;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Stationarity residual of one coordinate of a box-constrained convex
// problem: g_minus/g_plus are the one-sided partial derivatives.
double coordinate_residual(double x, double rate, double g_minus,
                           double g_plus, double eps) {
  const bool at_lower = x <= -rate + eps;
  const bool at_upper = x >= rate - eps;
  if (at_lower && at_upper) return 0.0;
  if (at_lower) return std::max(0.0, -g_plus);
  if (at_upper) return std::max(0.0, g_minus);
  return std::max({0.0, g_minus, -g_plus});
}

bool slack_ok(double level, double capacity, double mu_now, double mu_next,
              const ToleranceSet& tol) {
  const double d = mu_next - mu_now;
  if (std::abs(d) <= tol.eps_mu) return true;
  if (level <= tol.eps_S && d <= tol.eps_mu) return true;
  if (level >= capacity - tol.eps_S && d >= -tol.eps_mu) return true;
  return false;
}

template <typename F>
void parallel_for(int begin, int end, F&& body) {
  const int n = end - begin;
  const int workers =
      std::max(1, std::min<int>(static_cast<int>(worker_threads()), n / 4));
  if (workers <= 1) {
    for (int i = begin; i < end; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (int i = begin + w; i < end; i += workers) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

int grid_index(double level, double delta, const char* what) {
  const double r = level / delta;
  const double k = std::round(r);
  if (std::abs(r - k) > 1e-7) {
    throw std::invalid_argument(std::string(what) +
                                " is not a multiple of the grid step");
  }
  return static_cast<int>(k);
}

}  // namespace

unsigned worker_threads() {
  if (const char* env = std::getenv("DUOSTORE_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

CertificateReport certify(const Strategy& strategy,
                          const MultiplierPath& multipliers,
                          const ProblemInstance& instance,
                          const ToleranceSet& tol) {
  CertificateReport rep;
  const int T = instance.horizon();
  if (strategy.horizon() != T ||
      strategy.levels2.size() != strategy.levels1.size() ||
      static_cast<int>(multipliers.mu1.size()) != T ||
      static_cast<int>(multipliers.nu2.size()) != T) {
    rep.max_violation = kInf;
    return rep;
  }
  const double p1 = instance.unit1.rate;
  const double p2 = instance.unit2.rate;
  const double bound = p1 + p2;
  const CostModel& costs = instance.costs;

  rep.max_violation = feasibility_violation(strategy, instance);
  rep.feasible = rep.max_violation <= tol.eps_S;

  for (int t = 1; t <= T; ++t) {
    const double x1 = strategy.levels1[t] - strategy.levels1[t - 1];
    const double x2 = strategy.levels2[t] - strategy.levels2[t - 1];
    const double mu1 = multipliers.mu1[t - 1];
    const double mu2 = multipliers.nu2[t - 1].mu2;

    double grid_min = kInf;
    for (int a = 0; a < kGridPoints; ++a) {
      const double g1 = -p1 + 2.0 * p1 * a / (kGridPoints - 1);
      for (int b = 0; b < kGridPoints; ++b) {
        const double g2 = -p2 + 2.0 * p2 * b / (kGridPoints - 1);
        grid_min =
            std::min(grid_min, pair_objective(costs, t, mu1, mu2, g1, g2));
      }
    }
    // Evaluate at the box projection so rounding noise cannot leave the
    // cost domain.
    const double c1 = std::clamp(x1, -p1, p1);
    const double c2 = std::clamp(x2, -p2, p2);
    const double gap = pair_objective(costs, t, mu1, mu2, c1, c2) - grid_min;

    const double xi = std::clamp(c1 + c2, -bound, bound);
    const double dm = costs.left_derivative(t, xi);
    const double dp = costs.right_derivative(t, xi);
    const double r1 =
        coordinate_residual(x1, p1, dm - mu1, dp - mu1, tol.eps_S) * p1;
    const double r2 =
        coordinate_residual(x2, p2, dm - mu2, dp - mu2, tol.eps_S) * p2;
    const double kkt = std::max(r1, r2);
    if (gap > rep.worst_gap || kkt > rep.worst_kkt) rep.worst_time = t;
    rep.worst_gap = std::max(rep.worst_gap, gap);
    rep.worst_kkt = std::max(rep.worst_kkt, kkt);
  }
  rep.minimization_ok =
      rep.worst_gap <= tol.eps_cost && rep.worst_kkt <= tol.eps_cost;

  for (int t = 1; t <= T - 1; ++t) {
    if (!slack_ok(strategy.levels1[t], instance.unit1.capacity,
                  multipliers.mu1[t - 1], multipliers.mu1[t], tol))
      rep.slackness_violations.emplace_back(1, t);
    if (!slack_ok(strategy.levels2[t], instance.unit2.capacity,
                  multipliers.nu2[t - 1].mu2, multipliers.nu2[t].mu2, tol))
      rep.slackness_violations.emplace_back(2, t);
  }
  rep.slackness_ok = rep.slackness_violations.empty();
  rep.overall = rep.feasible && rep.minimization_ok && rep.slackness_ok;
  return rep;
}

CertificateReport certify_single(const std::vector<double>& levels,
                                 const std::vector<double>& multipliers,
                                 const SingleUnitProblem& problem) {
  CertificateReport rep;
  const int T = problem.horizon();
  const ToleranceSet& tol = problem.tolerances;
  if (static_cast<int>(levels.size()) != T + 1 ||
      static_cast<int>(multipliers.size()) != T) {
    rep.max_violation = kInf;
    return rep;
  }
  const double rate = problem.unit.rate;
  const CostModel& costs = problem.costs;
  rep.max_violation = feasibility_violation(
      levels, problem.unit, problem.initial_level, problem.final_level);
  rep.feasible = rep.max_violation <= tol.eps_S;

  for (int t = 1; t <= T; ++t) {
    const double x = levels[t] - levels[t - 1];
    const double mu = multipliers[t - 1];
    double grid_min = kInf;
    for (int a = 0; a < kGridPoints; ++a) {
      const double g = -rate + 2.0 * rate * a / (kGridPoints - 1);
      grid_min = std::min(grid_min, costs.value(t, g) - mu * g);
    }
    const double c = std::clamp(x, -rate, rate);
    const double gap = costs.value(t, c) - mu * c - grid_min;
    const double kkt =
        coordinate_residual(x, rate, costs.left_derivative(t, c) - mu,
                            costs.right_derivative(t, c) - mu, tol.eps_S) *
        rate;
    if (gap > rep.worst_gap || kkt > rep.worst_kkt) rep.worst_time = t;
    rep.worst_gap = std::max(rep.worst_gap, gap);
    rep.worst_kkt = std::max(rep.worst_kkt, kkt);
  }
  rep.minimization_ok =
      rep.worst_gap <= tol.eps_cost && rep.worst_kkt <= tol.eps_cost;

  for (int t = 1; t <= T - 1; ++t) {
    if (!slack_ok(levels[t], problem.unit.capacity, multipliers[t - 1],
                  multipliers[t], tol))
      rep.slackness_violations.emplace_back(1, t);
  }
  rep.slackness_ok = rep.slackness_violations.empty();
  rep.overall = rep.feasible && rep.minimization_ok && rep.slackness_ok;
  return rep;
}

BudgetExceeded::BudgetExceeded(double required, double budget)
    : std::runtime_error([&] {
        std::ostringstream msg;
        msg << "grid oracle needs about " << required
            << " transition evaluations, budget is " << budget;
        return msg.str();
      }()),
      required_(required) {}

OracleResult oracle_dp(const ProblemInstance& instance, double delta1,
                       double delta2, double budget) {
  if (!(delta1 > 0.0 && delta2 > 0.0))
    throw std::invalid_argument("grid steps must be positive");
  const int T = instance.horizon();
  const int n1 = grid_index(instance.unit1.capacity, delta1, "capacity 1");
  const int n2 = grid_index(instance.unit2.capacity, delta2, "capacity 2");
  const int k1max =
      static_cast<int>(std::floor(instance.unit1.rate / delta1 + 1e-9));
  const int k2max =
      static_cast<int>(std::floor(instance.unit2.rate / delta2 + 1e-9));
  const double required = static_cast<double>(T) * (n1 + 1.0) * (n2 + 1.0) *
                          (2.0 * k1max + 1.0) * (2.0 * k2max + 1.0);
  if (required > budget) throw BudgetExceeded(required, budget);

  const int a0 = grid_index(instance.initial_levels[0], delta1, "initial 1");
  const int b0 = grid_index(instance.initial_levels[1], delta2, "initial 2");
  const int aT = grid_index(instance.final_levels[0], delta1, "final 1");
  const int bT = grid_index(instance.final_levels[1], delta2, "final 2");

  const int w2 = n2 + 1;
  const std::size_t states = static_cast<std::size_t>(n1 + 1) * w2;
  const int kw2 = 2 * k2max + 1;
  std::vector<double> prev(states, kInf), next(states, kInf);
  prev[static_cast<std::size_t>(a0) * w2 + b0] = 0.0;
  // Chosen (k1, k2) per state and time, packed as k1 * kw2 + k2 offsets.
  std::vector<std::int32_t> choice(static_cast<std::size_t>(T) * states, -1);
  std::vector<double> step_cost(static_cast<std::size_t>(2 * k1max + 1) * kw2);

  for (int t = 1; t <= T; ++t) {
    for (int k1 = -k1max; k1 <= k1max; ++k1)
      for (int k2 = -k2max; k2 <= k2max; ++k2)
        step_cost[static_cast<std::size_t>(k1 + k1max) * kw2 + k2 + k2max] =
            instance.costs.value(t, k1 * delta1 + k2 * delta2);
    std::int32_t* pick = choice.data() + static_cast<std::size_t>(t - 1) * states;
    parallel_for(0, n1 + 1, [&](int i1) {
      for (int i2 = 0; i2 <= n2; ++i2) {
        double best = kInf;
        std::int32_t arg = -1;
        const int lo1 = std::max(-k1max, i1 - n1), hi1 = std::min(k1max, i1);
        const int lo2 = std::max(-k2max, i2 - n2), hi2 = std::min(k2max, i2);
        for (int k1 = lo1; k1 <= hi1; ++k1) {
          const double* row = prev.data() + static_cast<std::size_t>(i1 - k1) * w2;
          const double* cost_row =
              step_cost.data() + static_cast<std::size_t>(k1 + k1max) * kw2 + k2max;
          for (int k2 = lo2; k2 <= hi2; ++k2) {
            const double v = row[i2 - k2] + cost_row[k2];
            if (v < best) {
              best = v;
              arg = (k1 + k1max) * kw2 + (k2 + k2max);
            }
          }
        }
        const std::size_t idx = static_cast<std::size_t>(i1) * w2 + i2;
        next[idx] = best;
        pick[idx] = arg;
      }
    });
    std::swap(prev, next);
  }

  const std::size_t terminal = static_cast<std::size_t>(aT) * w2 + bT;
  if (!std::isfinite(prev[terminal]))
    throw std::runtime_error("terminal levels unreachable on the grid");

  OracleResult out;
  out.cost = prev[terminal];
  out.delta1 = delta1;
  out.delta2 = delta2;
  out.strategy.levels1.assign(T + 1, 0.0);
  out.strategy.levels2.assign(T + 1, 0.0);
  int i1 = aT, i2 = bT;
  for (int t = T; t >= 1; --t) {
    out.strategy.levels1[t] = i1 * delta1;
    out.strategy.levels2[t] = i2 * delta2;
    const std::int32_t arg =
        choice[static_cast<std::size_t>(t - 1) * states +
               static_cast<std::size_t>(i1) * w2 + i2];
    i1 -= arg / kw2 - k1max;
    i2 -= arg % kw2 - k2max;
  }
  out.strategy.levels1[0] = i1 * delta1;
  out.strategy.levels2[0] = i2 * delta2;
  return out;
}

SingleOracleResult oracle_dp_single(const SingleUnitProblem& problem,
                                    double delta, double budget) {
  if (!(delta > 0.0)) throw std::invalid_argument("grid step must be positive");
  const int T = problem.horizon();
  const int n = grid_index(problem.unit.capacity, delta, "capacity");
  const int kmax =
      static_cast<int>(std::floor(problem.unit.rate / delta + 1e-9));
  const double required =
      static_cast<double>(T) * (n + 1.0) * (2.0 * kmax + 1.0);
  if (required > budget) throw BudgetExceeded(required, budget);
  const int i0 = grid_index(problem.initial_level, delta, "initial level");
  const int iT = grid_index(problem.final_level, delta, "final level");

  std::vector<double> prev(n + 1, kInf), next(n + 1);
  prev[i0] = 0.0;
  std::vector<int> choice(static_cast<std::size_t>(T) * (n + 1), 0);
  for (int t = 1; t <= T; ++t) {
    for (int i = 0; i <= n; ++i) {
      double best = kInf;
      int arg = 0;
      for (int k = std::max(-kmax, i - n); k <= std::min(kmax, i); ++k) {
        const double v = prev[i - k] + problem.costs.value(t, k * delta);
        if (v < best) {
          best = v;
          arg = k;
        }
      }
      next[i] = best;
      choice[static_cast<std::size_t>(t - 1) * (n + 1) + i] = arg;
    }
    std::swap(prev, next);
  }
  if (!std::isfinite(prev[iT]))
    throw std::runtime_error("terminal level unreachable on the grid");
  SingleOracleResult out;
  out.cost = prev[iT];
  out.levels.assign(T + 1, 0.0);
  int i = iT;
  for (int t = T; t >= 1; --t) {
    out.levels[t] = i * delta;
    i -= choice[static_cast<std::size_t>(t - 1) * (n + 1) + i];
  }
  out.levels[0] = i * delta;
  return out;
}

double cost_lipschitz(const ProblemInstance& instance) {
  double lip = 0.0;
  for (int t = 1; t <= instance.horizon(); ++t)
    lip = std::max(lip, instance.costs.left_derivative(t, instance.total_rate()));
  return lip;
}

GapReport compare(double cost_alg, const OracleResult& oracle,
                  const ProblemInstance& instance) {
  GapReport g;
  g.cost_alg = cost_alg;
  g.cost_dp = oracle.cost;
  g.gap = cost_alg - oracle.cost;
  g.bound = cost_lipschitz(instance) * std::max(oracle.delta1, oracle.delta2) *
            instance.horizon();
  g.beats_grid = g.gap <= instance.tolerances.eps_cost;
  g.within_bound = std::abs(g.gap) <= g.bound;
  return g;
}

}  // namespace duostore
