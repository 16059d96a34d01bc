#include "duostore/duo.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace duostore {

namespace {

bool same_ratio(const StorageUnit& a, const StorageUnit& b) {
  const double ra = a.ratio(), rb = b.ratio();
  return std::abs(ra - rb) <= 1e-12 * std::max(std::abs(ra), std::abs(rb));
}

}  // namespace

UnitOrder order_units(const StorageUnit& a, const StorageUnit& b) {
  UnitOrder o;
  o.equal_ratio = same_ratio(a, b);
  if (!o.equal_ratio && b.ratio() > a.ratio()) {
    o.unit1 = b;
    o.unit2 = a;
    o.swapped = true;
  } else {
    o.unit1 = a;
    o.unit2 = b;
  }
  return o;
}

ProblemInstance swap_units(const ProblemInstance& instance) {
  ProblemInstance s = instance;
  std::swap(s.unit1, s.unit2);
  std::swap(s.initial_levels[0], s.initial_levels[1]);
  std::swap(s.final_levels[0], s.final_levels[1]);
  return s;
}

double embed_second(const SecondParam& p, double mu1) {
  if (p.mu2 < mu1) return p.mu2;
  if (p.mu2 > mu1) return p.mu2 + 1.0;
  return mu1 + std::clamp(p.kappa2, 0.0, 1.0);
}

SecondParam unembed_second(double theta, double mu1) {
  if (theta < mu1) return {theta, 0.0};
  if (theta > mu1 + 1.0) return {theta - 1.0, 1.0};
  return {mu1, theta - mu1};
}

InnerFamily::InnerFamily(const ProblemInstance& instance, double mu1)
    : instance_(instance), mu1_(mu1) {
  const MultiplierBracket b =
      saturation_bracket(instance.costs, instance.total_rate());
  lo_ = embed_second({std::min(b.lo, mu1 - 1.0), 0.0}, mu1);
  hi_ = embed_second({std::max(b.hi, mu1 + 1.0), 1.0}, mu1);
}

PairIncrement InnerFamily::pair(double theta, int t) const {
  return xhat_pair(instance_.costs, t, {mu1_, unembed_second(theta, mu1_)},
                   instance_.unit1.rate, instance_.unit2.rate,
                   instance_.tolerances.eps_x);
}

std::vector<double> InnerFamily::increments(double theta, int first,
                                            int count) const {
  const int n = std::max(0, std::min(count, instance_.horizon() - first + 1));
  std::vector<double> x(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) x[k] = pair(theta, first + k).x2;
  return x;
}

InnerRun inner_solve_unit2(const ProblemInstance& instance, double mu1,
                           int start, std::array<double, 2> start_levels,
                           int until) {
  InnerFamily family(instance, mu1);
  StageWindow w;
  w.start = start;
  w.start_level = start_levels[1];
  w.capacity = instance.unit2.capacity;
  w.horizon = instance.horizon();
  w.terminal_level = instance.final_levels[1];
  StageOptions options;
  options.tol = instance.tolerances;
  StagedSolution staged = solve_with_family(family, w, options, until);

  InnerRun run;
  run.start = start;
  run.mu1 = mu1;
  const std::size_t n = staged.increments.size();
  run.x1.resize(n);
  run.x2 = std::move(staged.increments);
  run.nu2.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const int t = start + 1 + static_cast<int>(k);
    run.nu2[k] = unembed_second(staged.thetas[k], mu1);
    run.x1[k] = family.pair(staged.thetas[k], t).x1;
  }
  run.unit2 = std::move(staged.horizons);
  return run;
}

OuterFamily::OuterFamily(const ProblemInstance& instance, int start,
                         std::array<double, 2> start_levels)
    : instance_(instance), start_(start), levels_(start_levels) {
  const MultiplierBracket b =
      saturation_bracket(instance.costs, instance.total_rate());
  lo_ = b.lo;
  hi_ = b.hi;
}

std::vector<double> OuterFamily::increments(double theta, int first,
                                            int count) const {
  if (first <= start_)
    throw std::invalid_argument("outer family starts after its stage start");
  const int until = std::min(first + count - 1, instance_.horizon());
  InnerRun run = inner_solve_unit2(instance_, theta, start_, levels_, until);
  const std::size_t skip = static_cast<std::size_t>(first - start_ - 1);
  if (run.x1.size() <= skip) return {};
  return {run.x1.begin() + static_cast<std::ptrdiff_t>(skip), run.x1.end()};
}

StateMatch state_match_check(const Strategy& strategy,
                             const ProblemInstance& instance, int tau1,
                             Boundary boundary) {
  StateMatch m;
  m.time = tau1;
  m.boundary = boundary;
  m.level2 = strategy.levels2.at(static_cast<std::size_t>(tau1));
  const double eps = instance.tolerances.eps_S;
  switch (boundary) {
    case Boundary::Terminal:
      m.match = true;
      break;
    case Boundary::Empty:
      m.match = std::abs(m.level2) <= eps;
      break;
    case Boundary::Full:
      m.match = std::abs(m.level2 - instance.unit2.capacity) <= eps;
      break;
  }
  return m;
}

const char* to_string(Diagnostic::Kind kind) {
  switch (kind) {
    case Diagnostic::Kind::MonotonicityViolation:
      return "monotonicity_violation";
    case Diagnostic::Kind::StateMatchFailure:
      return "state_match_failure";
  }
  return "?";
}

SolveResult solve_two(const ProblemInstance& instance) {
  const ValidationReport report = validate_instance(instance);
  if (!report.ok())
    throw std::invalid_argument("invalid instance: " + report.summary());
  if (instance.unit1.ratio() < instance.unit2.ratio() &&
      !same_ratio(instance.unit1, instance.unit2))
    throw std::invalid_argument("unit 1 must have the larger E/P ratio");

  const int T = instance.horizon();
  SolveResult result;
  Strategy& S = result.strategy;
  S.levels1.assign(1, instance.initial_levels[0]);
  S.levels2.assign(1, instance.initial_levels[1]);

  std::array<double, 2> levels = instance.initial_levels;
  int start = 0;
  StageOptions options;
  options.tol = instance.tolerances;
  options.strict_monotone = false;
  while (start < T) {
    OuterFamily family(instance, start, levels);
    StageWindow w;
    w.start = start;
    w.start_level = levels[0];
    w.capacity = instance.unit1.capacity;
    w.horizon = T;
    w.terminal_level = instance.final_levels[0];
    StageResult stage = run_stage(family, w, options);

    for (const MonotonicityViolation& v : stage.violations) {
      std::ostringstream msg;
      msg << "outer family decreases at t=" << v.time << " between mu1="
          << v.theta_lo << " and " << v.theta_hi << " by " << v.excess;
      result.diagnostics.push_back(
          {Diagnostic::Kind::MonotonicityViolation, v.time, msg.str()});
    }

    InnerRun inner = inner_solve_unit2(instance, stage.theta_star, start,
                                       levels, stage.decision);
    for (int t = start + 1; t <= stage.decision; ++t) {
      const std::size_t k = static_cast<std::size_t>(t - start - 1);
      levels[0] += stage.prefix_increments[k];
      levels[1] += inner.x2[k];
      S.levels1.push_back(levels[0]);
      S.levels2.push_back(levels[1]);
      result.multipliers.mu1.push_back(stage.theta_star);
      result.multipliers.nu2.push_back(inner.nu2[k]);
    }

    HorizonReport nested;
    for (StageResult& r : inner.unit2.stages) {
      if (r.start < stage.decision) nested.stages.push_back(std::move(r));
    }
    result.unit2_horizons.push_back(std::move(nested));

    StateMatch match =
        state_match_check(S, instance, stage.decision, stage.boundary);
    if (!match.match) {
      std::ostringstream msg;
      msg << "unit 1 " << to_string(stage.boundary) << " at t="
          << stage.decision << " but unit 2 level is " << match.level2;
      result.diagnostics.push_back(
          {Diagnostic::Kind::StateMatchFailure, stage.decision, msg.str()});
    }
    result.state_matches.push_back(match);

    start = stage.decision;
    options.previous_theta = stage.theta_star;
    result.horizons.stages.push_back(std::move(stage));
  }

  result.cost = total_cost(S, instance);
  result.certificate =
      certify(S, result.multipliers, instance, instance.tolerances);
  return result;
}

double alpha_share(const ProblemInstance& instance) {
  return instance.unit1.capacity /
         (instance.unit1.capacity + instance.unit2.capacity);
}

SingleUnitProblem aggregate_problem(const ProblemInstance& instance) {
  SingleUnitProblem p;
  p.unit = {instance.unit1.capacity + instance.unit2.capacity,
            instance.total_rate()};
  p.costs = instance.costs;
  p.initial_level = instance.initial_levels[0] + instance.initial_levels[1];
  p.final_level = instance.final_levels[0] + instance.final_levels[1];
  p.tolerances = instance.tolerances;
  return p;
}

namespace {

bool split_consistent(const ProblemInstance& instance) {
  const double a = alpha_share(instance);
  const double eps = instance.tolerances.eps_S;
  const auto consistent = [&](const std::array<double, 2>& lv) {
    return std::abs(lv[0] - a * (lv[0] + lv[1])) <= eps;
  };
  return consistent(instance.initial_levels) &&
         consistent(instance.final_levels);
}

}  // namespace

SolveResult reduce_equal_ratio(const ProblemInstance& instance) {
  if (!same_ratio(instance.unit1, instance.unit2))
    throw std::invalid_argument(
        "equal-ratio reduction applied to units with different E/P ratios");
  if (!split_consistent(instance))
    throw std::invalid_argument(
        "boundary levels are not split in proportion to capacity");

  const SingleUnitProblem agg = aggregate_problem(instance);
  SingleSolution single = solve_single(agg);
  const double a = alpha_share(instance);
  const int T = instance.horizon();

  SolveResult result;
  result.reduced = true;
  result.strategy.levels1.resize(T + 1);
  result.strategy.levels2.resize(T + 1);
  for (int t = 0; t <= T; ++t) {
    result.strategy.levels1[t] = a * single.levels[t];
    result.strategy.levels2[t] = (1.0 - a) * single.levels[t];
  }
  // Both units share the aggregate multiplier; kappa2 places unit 1's share
  // on the tie segment.
  for (int t = 1; t <= T; ++t) {
    const double mu = single.multipliers[t - 1];
    const double x1 = result.strategy.levels1[t] - result.strategy.levels1[t - 1];
    const TieSegment seg =
        tie_segment(instance.costs, t, mu, instance.unit1.rate,
                    instance.unit2.rate, instance.tolerances.eps_x);
    const double width = seg.x1_max - seg.x1_min;
    const double kappa =
        width > 0.0 ? std::clamp((seg.x1_max - x1) / width, 0.0, 1.0) : 0.0;
    result.multipliers.mu1.push_back(mu);
    result.multipliers.nu2.push_back({mu, kappa});
  }
  result.horizons = single.horizons;
  for (std::size_t i = 0; i < single.horizons.stages.size(); ++i) {
    const StageResult& st = single.horizons.stages[i];
    result.unit2_horizons.push_back(HorizonReport{{st}});
    result.state_matches.push_back(
        state_match_check(result.strategy, instance, st.decision, st.boundary));
  }
  result.cost = total_cost(result.strategy, instance);
  result.certificate = certify(result.strategy, result.multipliers, instance,
                               instance.tolerances);
  return result;
}

SolveResult solve(const ProblemInstance& instance, bool* swapped) {
  const UnitOrder order = order_units(instance.unit1, instance.unit2);
  if (swapped) *swapped = order.swapped;
  if (order.equal_ratio && split_consistent(instance))
    return reduce_equal_ratio(instance);
  if (order.swapped) return solve_two(swap_units(instance));
  return solve_two(instance);
}

SeparableReport near_separable_compare(const ProblemInstance& instance) {
  SeparableReport rep;
  rep.joint_cost = solve(instance).cost;
  for (int j = 0; j < 2; ++j) {
    SingleUnitProblem p;
    p.unit = instance.unit(j);
    p.costs = instance.costs;
    p.initial_level = instance.initial_levels[j];
    p.final_level = instance.final_levels[j];
    p.tolerances = instance.tolerances;
    const SingleSolution s = solve_single(p);
    rep.separate_cost += single_cost(s.levels, instance.costs);
  }
  rep.gap = rep.joint_cost - rep.separate_cost;
  rep.relative_gap =
      std::abs(rep.gap) / std::max(std::abs(rep.separate_cost), 1e-300);
  return rep;
}

std::vector<int> forecast_by_time(const HorizonReport& report, int horizon) {
  std::vector<int> out(static_cast<std::size_t>(horizon), horizon);
  for (const StageResult& st : report.stages) {
    for (int t = st.start + 1; t <= std::min(st.decision, horizon); ++t)
      out[static_cast<std::size_t>(t - 1)] = st.forecast;
  }
  return out;
}

}  // namespace duostore
