#include "duostore/stage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "duostore/scalar.hpp"

namespace duostore {

SingleUnitFamily::SingleUnitFamily(const CostModel& costs, double rate,
                                   double eps_x)
    : costs_(costs), rate_(rate), eps_x_(eps_x) {
  const MultiplierBracket b = saturation_bracket(costs, rate);
  lo_ = b.lo;
  hi_ = b.hi;
}

std::vector<double> SingleUnitFamily::increments(double theta, int first,
                                                 int count) const {
  const int n = std::max(0, std::min(count, costs_.horizon() - first + 1));
  std::vector<double> x(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k)
    x[k] = xhat_single(costs_, first + k, theta, rate_, eps_x_);
  return x;
}

const char* to_string(Boundary b) {
  switch (b) {
    case Boundary::Empty:
      return "empty";
    case Boundary::Full:
      return "full";
    case Boundary::Terminal:
      return "terminal";
  }
  return "?";
}

namespace {

struct Probe {
  double theta = 0.0;
  std::vector<double> x;
  std::vector<double> level;  // level[k] is S at time start + 1 + k
};

class Scanner {
 public:
  Scanner(const IncrementFamily& family, const StageWindow& window,
          const StageOptions& options)
      : family_(family),
        window_(window),
        options_(options),
        length_(window.horizon - window.start),
        level_tol_(1e-3 * options.tol.eps_S) {}

  double level_tol() const { return level_tol_; }

  Probe evaluate(double theta, int count) const {
    count = std::clamp(count, 1, length_);
    Probe p;
    p.theta = theta;
    p.x = family_.increments(theta, window_.start + 1, count);
    if (static_cast<int>(p.x.size()) > length_) p.x.resize(length_);
    if (static_cast<int>(p.x.size()) < count)
      throw std::logic_error("increment family returned too few values");
    p.level.resize(p.x.size());
    double s = window_.start_level;
    for (std::size_t k = 0; k < p.x.size(); ++k) {
      s += p.x[k];
      p.level[k] = s;
    }
    return p;
  }

  void ensure(Probe& p, int count) const {
    if (static_cast<int>(p.x.size()) >= count) return;
    const int grown = std::max(count, 2 * static_cast<int>(p.x.size()));
    p = evaluate(p.theta, std::min(grown, length_));
  }

  double level(const Probe& p, int t) const {
    return p.level[static_cast<std::size_t>(t - window_.start - 1)];
  }

  // Level of `mid` at t, clamped into the monotone envelope spanned by lo
  // and hi. Increments outside [lo, hi] beyond eps_S are a violation.
  double checked_level(const Probe& lo, const Probe& mid, const Probe& hi,
                       int t) {
    const std::size_t n =
        std::min({lo.x.size(), mid.x.size(), hi.x.size()});
    const double tol = options_.tol.eps_S;
    MonotonicityViolation worst;
    for (std::size_t k = 0; k < n; ++k) {
      const double excess =
          std::max(lo.x[k] - mid.x[k], mid.x[k] - hi.x[k]);
      if (excess > tol && excess > worst.excess) {
        worst.time = window_.start + 1 + static_cast<int>(k);
        worst.theta_lo = lo.theta;
        worst.theta_hi = hi.theta;
        worst.excess = excess;
      }
    }
    if (worst.excess > 0.0) {
      if (options_.strict_monotone) {
        std::ostringstream msg;
        msg << "increment family not monotone at t=" << worst.time
            << " between theta=" << worst.theta_lo << " and "
            << worst.theta_hi << " (excess " << worst.excess << ")";
        throw MonotonicityError(msg.str());
      }
      violations.push_back(worst);
    }
    return std::clamp(level(mid, t), level(lo, t),
                      std::max(level(lo, t), level(hi, t)));
  }

  // AtLeast keeps S_t(lo) < target <= S_t(hi) and returns hi; AtMost keeps
  // S_t(lo) <= target < S_t(hi) and returns lo.
  Probe bisect(Probe lo, Probe hi, int t, double target, BoundMode mode) {
    const int k = t - window_.start;
    const double eps_mu = options_.tol.eps_mu;
    for (int iter = 0; iter < 400; ++iter) {
      const double width = hi.theta - lo.theta;
      if (width <= eps_mu) {
        const double gap = level(hi, t) - level(lo, t);
        if (gap <= level_tol_ || width <= 1e-6 * eps_mu) break;
      }
      const double mid = lo.theta + 0.5 * width;
      if (!(mid > lo.theta && mid < hi.theta)) break;
      Probe m = evaluate(mid, k);
      const double s = checked_level(lo, m, hi, t);
      const bool upper_half =
          mode == BoundMode::AtLeast ? s >= target : s > target;
      if (upper_half) {
        hi = std::move(m);
      } else {
        lo = std::move(m);
      }
    }
    return mode == BoundMode::AtLeast ? std::move(hi) : std::move(lo);
  }

  void require_reachable(int t, double target, BoundMode mode) const {
    const int k = t - window_.start;
    if (mode == BoundMode::AtLeast) {
      const Probe top = evaluate(family_.upper_bracket(), k);
      if (level(top, t) < target - level_tol_) {
        std::ostringstream msg;
        msg << "level " << target << " unreachable at t=" << t
            << " even at full charge rate";
        throw InfeasibleError(t, msg.str());
      }
    } else {
      const Probe bottom = evaluate(family_.lower_bracket(), k);
      if (level(bottom, t) > target + level_tol_) {
        std::ostringstream msg;
        msg << "level " << target << " unreachable at t=" << t
            << " even at full discharge rate";
        throw InfeasibleError(t, msg.str());
      }
    }
  }

  bool trajectory_feasible(const Probe& p) const {
    const double eps = options_.tol.eps_S;
    for (std::size_t k = 0; k < p.level.size(); ++k) {
      if (p.level[k] < -eps || p.level[k] > window_.capacity + eps)
        return false;
    }
    return std::abs(p.level.back() - window_.terminal_level) <= eps;
  }

  StageResult finish(Probe p, int crossing, Boundary boundary) {
    const int s = window_.start;
    const int last = crossing - 1;
    if (last < s + 1) {
      throw InfeasibleError(crossing, "multiplier envelope empty at first step");
    }
    const double target = boundary == Boundary::Full ? window_.capacity : 0.0;
    const double eps = options_.tol.eps_S;
    int decision = -1;
    int closest = last;
    double closest_gap = std::abs(level(p, last) - target);
    for (int u = last; u >= s + 1; --u) {
      const double gap = std::abs(level(p, u) - target);
      if (gap <= eps) {
        decision = u;
        break;
      }
      if (gap < closest_gap) {
        closest_gap = gap;
        closest = u;
      }
    }
    if (decision < 0) decision = closest;

    StageResult r;
    r.theta_star = p.theta;
    r.start = s;
    r.decision = decision;
    r.forecast = crossing;
    r.boundary = boundary;
    r.prefix_increments.assign(p.x.begin(), p.x.begin() + (decision - s));
    r.boundary_gap = std::abs(level(p, decision) - target);
    r.violations = std::move(violations);
    return r;
  }

  StageResult finish_terminal(Probe lo, Probe hi) {
    const int T = window_.horizon;
    double theta = lo.theta;
    if (options_.previous_theta)
      theta = std::clamp(*options_.previous_theta, lo.theta, hi.theta);

    Probe chosen;
    if (theta == lo.theta) {
      chosen = std::move(lo);
    } else if (theta == hi.theta) {
      chosen = std::move(hi);
    } else {
      chosen = evaluate(theta, length_);
      if (!trajectory_feasible(chosen)) chosen = std::move(lo);
    }
    ensure(chosen, length_);

    StageResult r;
    r.theta_star = chosen.theta;
    r.start = window_.start;
    r.decision = T;
    r.forecast = T;
    r.boundary = Boundary::Terminal;
    r.prefix_increments = chosen.x;
    r.boundary_gap = std::abs(level(chosen, T) - window_.terminal_level);
    r.violations = std::move(violations);
    return r;
  }

  std::vector<MonotonicityViolation> violations;

 private:
  const IncrementFamily& family_;
  const StageWindow& window_;
  const StageOptions& options_;
  int length_;
  double level_tol_;
};

void check_window(const StageWindow& w, const ToleranceSet& tol) {
  if (w.start < 0 || w.start >= w.horizon)
    throw std::invalid_argument("stage start must lie before the horizon");
  if (w.start_level < -tol.eps_S || w.start_level > w.capacity + tol.eps_S)
    throw std::invalid_argument("stage start level outside [0, E]");
}

}  // namespace

double boundary_multiplier(const IncrementFamily& family, int start,
                           double start_level, int t, double target,
                           BoundMode mode, const ToleranceSet& tol) {
  StageWindow w;
  w.start = start;
  w.start_level = start_level;
  w.horizon = t;
  w.capacity = std::numeric_limits<double>::infinity();
  StageOptions options;
  options.tol = tol;
  Scanner scan(family, w, options);
  const int k = t - start;
  if (k < 1) throw std::invalid_argument("t must follow the start time");

  Probe lo = scan.evaluate(family.lower_bracket(), k);
  Probe hi = scan.evaluate(family.upper_bracket(), k);
  const double tol_level = scan.level_tol();
  if (mode == BoundMode::AtLeast) {
    if (scan.level(hi, t) < target - tol_level) {
      scan.require_reachable(t, target, mode);
    }
    if (scan.level(lo, t) >= target) return lo.theta;
    if (scan.level(hi, t) < target) return hi.theta;
    return scan.bisect(std::move(lo), std::move(hi), t, target, mode).theta;
  }
  if (scan.level(lo, t) > target + tol_level) {
    scan.require_reachable(t, target, mode);
  }
  if (scan.level(hi, t) <= target) return hi.theta;
  if (scan.level(lo, t) > target) return lo.theta;
  return scan.bisect(std::move(lo), std::move(hi), t, target, mode).theta;
}

StageResult run_stage(const IncrementFamily& family, const StageWindow& window,
                      const StageOptions& options) {
  check_window(window, options.tol);
  const int s = window.start;
  const int T = window.horizon;
  Scanner scan(family, window, options);
  const double tol_level = scan.level_tol();

  Probe lower_env = scan.evaluate(family.lower_bracket(), 1);
  Probe upper_env = scan.evaluate(family.upper_bracket(), 1);
  for (int t = s + 1; t <= T; ++t) {
    const int k = t - s;
    scan.ensure(lower_env, k);
    scan.ensure(upper_env, k);
    const bool last = t == T;
    const double lower = last ? window.terminal_level : 0.0;
    const double upper = last ? window.terminal_level : window.capacity;
    const double s_lo = scan.level(lower_env, t);
    const double s_hi = scan.level(upper_env, t);

    // mu-(t) above the upper envelope: the unit must fill up first.
    if (s_hi < lower - tol_level) {
      scan.require_reachable(t, lower, BoundMode::AtLeast);
      return scan.finish(std::move(upper_env), t, Boundary::Full);
    }
    // mu+(t) below the lower envelope: the unit must empty first.
    if (s_lo > upper + tol_level) {
      scan.require_reachable(t, upper, BoundMode::AtMost);
      return scan.finish(std::move(lower_env), t, Boundary::Empty);
    }
    if (s_lo < lower - tol_level) {
      lower_env = s_hi >= lower ? scan.bisect(std::move(lower_env), upper_env,
                                              t, lower, BoundMode::AtLeast)
                                : upper_env;
    }
    if (s_hi > upper + tol_level) {
      upper_env = scan.level(lower_env, t) <= upper
                      ? scan.bisect(lower_env, std::move(upper_env), t, upper,
                                    BoundMode::AtMost)
                      : lower_env;
    }
  }
  return scan.finish_terminal(std::move(lower_env), std::move(upper_env));
}

std::vector<double> StagedSolution::levels() const {
  return levels_from(start_level, increments);
}

StagedSolution solve_with_family(const IncrementFamily& family,
                                 const StageWindow& window,
                                 const StageOptions& options, int until) {
  StagedSolution sol;
  sol.start = window.start;
  sol.start_level = window.start_level;
  StageWindow current = window;
  StageOptions opts = options;
  double level = window.start_level;
  while (current.start < current.horizon) {
    StageResult r = run_stage(family, current, opts);
    for (double x : r.prefix_increments) {
      sol.increments.push_back(x);
      sol.thetas.push_back(r.theta_star);
      level += x;
    }
    current.start = r.decision;
    current.start_level = level;
    opts.previous_theta = r.theta_star;
    sol.horizons.stages.push_back(std::move(r));
    if (until > 0 && current.start >= until) break;
  }
  return sol;
}

SingleSolution solve_single(const SingleUnitProblem& problem) {
  const ValidationReport report = validate_single(problem);
  if (!report.ok())
    throw std::invalid_argument("invalid single-unit problem: " +
                                report.summary());
  SingleUnitFamily family(problem.costs, problem.unit.rate,
                          problem.tolerances.eps_x);
  StageWindow w;
  w.start = 0;
  w.start_level = problem.initial_level;
  w.capacity = problem.unit.capacity;
  w.horizon = problem.horizon();
  w.terminal_level = problem.final_level;
  StageOptions options;
  options.tol = problem.tolerances;
  StagedSolution staged = solve_with_family(family, w, options);

  SingleSolution sol;
  sol.levels = staged.levels();
  sol.multipliers = std::move(staged.thetas);
  sol.horizons = std::move(staged.horizons);
  return sol;
}

std::vector<MonotonicityViolation> audit_monotone(
    const IncrementFamily& family, int first, int count, double theta_lo,
    double theta_hi, int samples, double tol) {
  std::vector<MonotonicityViolation> out;
  if (samples < 2) return out;
  std::vector<double> prev;
  double prev_theta = theta_lo;
  for (int i = 0; i < samples; ++i) {
    const double theta =
        theta_lo + (theta_hi - theta_lo) * static_cast<double>(i) /
                       static_cast<double>(samples - 1);
    std::vector<double> x = family.increments(theta, first, count);
    x.resize(std::min<std::size_t>(x.size(), static_cast<std::size_t>(count)));
    const std::size_t n = std::min(prev.size(), x.size());
    for (std::size_t k = 0; k < n; ++k) {
      const double drop = prev[k] - x[k];
      if (drop > tol) {
        out.push_back({first + static_cast<int>(k), prev_theta, theta, drop});
      }
    }
    prev = std::move(x);
    prev_theta = theta;
  }
  return out;
}

}  // namespace duostore
