#include "duostore/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace duostore {

namespace {

double finite_difference_step(double x) {
  return 1e-7 * std::max(1.0, std::abs(x));
}

double golden_section(const std::function<double(double)>& f, double lo,
                      double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  // Endpoints can beat the interior bracket when the minimum is clamped.
  double best = 0.5 * (a + b);
  double best_value = f(best);
  for (double x : {lo, hi}) {
    double v = f(x);
    if (v < best_value) {
      best = x;
      best_value = v;
    }
  }
  return best;
}

}  // namespace

CostModel CostModel::quadratic_impact(std::vector<double> prices,
                                      double impact) {
  CostModel m;
  m.kind_ = Kind::QuadraticImpact;
  m.prices_ = std::move(prices);
  m.impact_ = impact;
  return m;
}

CostModel CostModel::custom(std::vector<ScalarCost> costs) {
  CostModel m;
  m.kind_ = Kind::Custom;
  m.custom_ = std::move(costs);
  return m;
}

int CostModel::horizon() const {
  return static_cast<int>(kind_ == Kind::QuadraticImpact ? prices_.size()
                                                         : custom_.size());
}

double CostModel::value(int t, double xi) const {
  if (kind_ == Kind::QuadraticImpact) {
    const double p = prices_[t - 1];
    return (p + impact_ * p * xi) * xi;
  }
  return custom_[t - 1].value(xi);
}

double CostModel::left_derivative(int t, double xi) const {
  if (kind_ == Kind::QuadraticImpact) {
    const double p = prices_[t - 1];
    return p * (1.0 + 2.0 * impact_ * xi);
  }
  const auto& c = custom_[t - 1];
  if (c.left_derivative) return c.left_derivative(xi);
  const double h = finite_difference_step(xi);
  return (c.value(xi) - c.value(xi - h)) / h;
}

double CostModel::right_derivative(int t, double xi) const {
  if (kind_ == Kind::QuadraticImpact) return left_derivative(t, xi);
  const auto& c = custom_[t - 1];
  if (c.right_derivative) return c.right_derivative(xi);
  const double h = finite_difference_step(xi);
  return (c.value(xi + h) - c.value(xi)) / h;
}

double CostModel::minimizer(int t, double mu, double lo, double hi,
                            double eps_x) const {
  if (kind_ == Kind::QuadraticImpact) {
    const double p = prices_[t - 1];
    return std::clamp((mu - p) / (2.0 * impact_ * p), lo, hi);
  }
  const auto& c = custom_[t - 1];
  if (!c.left_derivative || !c.right_derivative) {
    return golden_section([&](double x) { return c.value(x) - mu * x; }, lo,
                          hi, eps_x);
  }
  if (c.right_derivative(lo) >= mu) return lo;
  if (c.left_derivative(hi) <= mu) return hi;
  // Invariant: C'_+(a) < mu and C'_-(b) > mu.
  double a = lo, b = hi;
  while (b - a > eps_x) {
    const double m = 0.5 * (a + b);
    if (m <= a || m >= b) break;
    if (c.right_derivative(m) < mu) {
      a = m;
    } else if (c.left_derivative(m) > mu) {
      b = m;
    } else {
      return m;
    }
  }
  return 0.5 * (a + b);
}

double CostModel::reference_price(int t) const {
  if (kind_ == Kind::QuadraticImpact) return prices_[t - 1];
  return 0.5 * (left_derivative(t, 0.0) + right_derivative(t, 0.0));
}

CostModel CostModel::with_prices(std::vector<double> prices) const {
  if (kind_ != Kind::QuadraticImpact)
    throw std::logic_error("with_prices requires a quadratic impact model");
  return quadratic_impact(std::move(prices), impact_);
}

ToleranceSet default_tolerances(const CostModel& costs, double total_rate,
                                double max_capacity) {
  double max_marginal = 0.0;
  double price_sum = 0.0;
  for (int t = 1; t <= costs.horizon(); ++t) {
    max_marginal = std::max(max_marginal,
                            std::abs(costs.left_derivative(t, total_rate)));
    price_sum += std::abs(costs.reference_price(t));
  }
  ToleranceSet tol;
  tol.eps_mu = 1e-9 * std::max(max_marginal, 1e-300);
  tol.eps_x = 1e-9 * total_rate;
  tol.eps_S = 1e-6 * max_capacity;
  tol.eps_cost = 1e-6 * std::max(price_sum * total_rate, 1e-300);
  return tol;
}

ProblemInstance make_instance(StorageUnit unit1, StorageUnit unit2,
                              CostModel costs,
                              std::array<double, 2> initial_levels,
                              std::array<double, 2> final_levels) {
  ProblemInstance inst;
  inst.unit1 = unit1;
  inst.unit2 = unit2;
  inst.costs = std::move(costs);
  inst.initial_levels = initial_levels;
  inst.final_levels = final_levels;
  inst.tolerances =
      default_tolerances(inst.costs, unit1.rate + unit2.rate,
                         std::max(unit1.capacity, unit2.capacity));
  return inst;
}

SingleUnitProblem make_single(StorageUnit unit, CostModel costs,
                              double initial_level, double final_level) {
  SingleUnitProblem p;
  p.unit = unit;
  p.costs = std::move(costs);
  p.initial_level = initial_level;
  p.final_level = final_level;
  p.tolerances = default_tolerances(p.costs, unit.rate, unit.capacity);
  return p;
}

std::vector<double> increments_of(std::span<const double> levels) {
  std::vector<double> x;
  if (levels.size() < 2) return x;
  x.reserve(levels.size() - 1);
  for (std::size_t t = 1; t < levels.size(); ++t)
    x.push_back(levels[t] - levels[t - 1]);
  return x;
}

std::vector<double> levels_from(double start,
                                std::span<const double> increments) {
  std::vector<double> s;
  s.reserve(increments.size() + 1);
  s.push_back(start);
  for (double x : increments) s.push_back(s.back() + x);
  return s;
}

double feasibility_violation(std::span<const double> levels,
                             const StorageUnit& unit, double initial_level,
                             double final_level) {
  if (levels.empty()) return std::numeric_limits<double>::infinity();
  double worst = std::abs(levels.front() - initial_level);
  worst = std::max(worst, std::abs(levels.back() - final_level));
  for (std::size_t t = 0; t < levels.size(); ++t) {
    worst = std::max(worst, -levels[t]);
    worst = std::max(worst, levels[t] - unit.capacity);
    if (t > 0) {
      worst = std::max(worst, std::abs(levels[t] - levels[t - 1]) - unit.rate);
    }
  }
  return std::max(worst, 0.0);
}

double feasibility_violation(const Strategy& strategy,
                             const ProblemInstance& instance) {
  const auto T = static_cast<std::size_t>(instance.horizon());
  if (strategy.levels1.size() != T + 1 || strategy.levels2.size() != T + 1)
    return std::numeric_limits<double>::infinity();
  return std::max(
      feasibility_violation(strategy.levels1, instance.unit1,
                            instance.initial_levels[0],
                            instance.final_levels[0]),
      feasibility_violation(strategy.levels2, instance.unit2,
                            instance.initial_levels[1],
                            instance.final_levels[1]));
}

bool feasible(const Strategy& strategy, const ProblemInstance& instance,
              double eps) {
  return feasibility_violation(strategy, instance) <= eps;
}

double total_cost(const Strategy& strategy, const ProblemInstance& instance) {
  const int T = instance.horizon();
  if (strategy.horizon() != T ||
      strategy.levels2.size() != strategy.levels1.size())
    throw std::invalid_argument("strategy length does not match horizon");
  const double bound = instance.total_rate();
  const double slack = 1e-9 * bound;
  double cost = 0.0;
  for (int t = 1; t <= T; ++t) {
    const double xi = (strategy.levels1[t] - strategy.levels1[t - 1]) +
                      (strategy.levels2[t] - strategy.levels2[t - 1]);
    if (std::abs(xi) > bound + slack) {
      std::ostringstream msg;
      msg << "combined increment " << xi << " at t=" << t
          << " outside cost domain [-" << bound << ", " << bound << "]";
      throw std::domain_error(msg.str());
    }
    cost += instance.costs.value(t, xi);
  }
  return cost;
}

double single_cost(std::span<const double> levels, const CostModel& costs) {
  double cost = 0.0;
  for (std::size_t t = 1; t < levels.size(); ++t)
    cost += costs.value(static_cast<int>(t), levels[t] - levels[t - 1]);
  return cost;
}

std::string ValidationReport::summary() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i) out << "; ";
    out << violations[i];
  }
  return out.str();
}

namespace {

void check_unit(const StorageUnit& u, const std::string& name,
                ValidationReport& report) {
  if (!(u.capacity > 0.0) || !std::isfinite(u.capacity))
    report.violations.push_back(name + ": capacity must be positive");
  if (!(u.rate > 0.0) || !std::isfinite(u.rate))
    report.violations.push_back(name + ": rate must be positive");
}

void check_levels(const StorageUnit& u, double initial, double final_level,
                  int horizon, const std::string& name,
                  ValidationReport& report) {
  if (!(initial >= 0.0 && initial <= u.capacity))
    report.violations.push_back(name + ": initial level outside [0, E]");
  if (!(final_level >= 0.0 && final_level <= u.capacity))
    report.violations.push_back(name + ": final level outside [0, E]");
  if (std::abs(final_level - initial) >
      horizon * u.rate * (1.0 + 1e-12))
    report.violations.push_back(name + ": terminal unreachable");
}

void check_costs(const CostModel& costs, double bound,
                 ValidationReport& report) {
  if (costs.horizon() < 1) {
    report.violations.push_back("empty horizon");
    return;
  }
  if (costs.kind() == CostModel::Kind::QuadraticImpact) {
    for (int t = 1; t <= costs.horizon(); ++t) {
      const double p = costs.prices()[t - 1];
      if (!(p > 0.0) || !std::isfinite(p)) {
        report.violations.push_back("nonpositive price at t=" +
                                    std::to_string(t));
      }
    }
    const double lambda = costs.impact();
    if (!(lambda > 0.0)) {
      report.violations.push_back("cost not strictly convex (impact <= 0)");
    } else if (!(lambda * bound < 0.5)) {
      report.violations.push_back(
          "cost not increasing on domain (impact * (P1+P2) >= 1/2)");
    }
    return;
  }
  // Custom costs: sampled checks of C(0)=0, monotonicity and convexity.
  const int samples = 200;
  for (int t = 1; t <= costs.horizon(); ++t) {
    if (std::abs(costs.value(t, 0.0)) > 1e-12) {
      report.violations.push_back("C_t(0) != 0 at t=" + std::to_string(t));
      continue;
    }
    double prev = costs.value(t, -bound);
    double prev_slope = -std::numeric_limits<double>::infinity();
    const double h = 2.0 * bound / samples;
    for (int k = 1; k <= samples; ++k) {
      const double x = -bound + k * h;
      const double v = costs.value(t, x);
      const double slope = (v - prev) / h;
      if (!(slope > 0.0)) {
        report.violations.push_back("cost not increasing at t=" +
                                    std::to_string(t));
        break;
      }
      if (!(slope > prev_slope)) {
        report.violations.push_back("cost not strictly convex at t=" +
                                    std::to_string(t));
        break;
      }
      prev = v;
      prev_slope = slope;
    }
  }
}

void check_tolerances(const ToleranceSet& tol, ValidationReport& report) {
  if (!(tol.eps_mu > 0.0 && tol.eps_x > 0.0 && tol.eps_S > 0.0 &&
        tol.eps_cost > 0.0))
    report.violations.push_back("tolerances must be strictly positive");
}

}  // namespace

ValidationReport validate_instance(const ProblemInstance& instance) {
  ValidationReport report;
  check_unit(instance.unit1, "unit 1", report);
  check_unit(instance.unit2, "unit 2", report);
  if (!report.ok()) return report;
  const int T = instance.horizon();
  check_costs(instance.costs, instance.total_rate(), report);
  check_levels(instance.unit1, instance.initial_levels[0],
               instance.final_levels[0], T, "unit 1", report);
  check_levels(instance.unit2, instance.initial_levels[1],
               instance.final_levels[1], T, "unit 2", report);
  check_tolerances(instance.tolerances, report);
  return report;
}

ValidationReport validate_single(const SingleUnitProblem& problem) {
  ValidationReport report;
  check_unit(problem.unit, "unit", report);
  if (!report.ok()) return report;
  check_costs(problem.costs, problem.unit.rate, report);
  check_levels(problem.unit, problem.initial_level, problem.final_level,
               problem.horizon(), "unit", report);
  check_tolerances(problem.tolerances, report);
  return report;
}

}  // namespace duostore
