#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "duostore/core.hpp"

namespace duostore {

/// A parameter family whose increments are nondecreasing in the parameter
/// and saturate at the brackets: x_t(lower_bracket()) = -P and
/// x_t(upper_bracket()) = +P for every t.
///
/// Parameters are real numbers. Families over ordered sets such as the
/// lexicographic (mu2, kappa2) embed them into the real line.
class IncrementFamily {
 public:
  virtual ~IncrementFamily() = default;

  virtual double lower_bracket() const = 0;
  virtual double upper_bracket() const = 0;

  /// Increments at times first, first + 1, ... under theta. Returns at least
  /// `count` values (more when they come for free), never past the horizon.
  virtual std::vector<double> increments(double theta, int first,
                                         int count) const = 0;
};

/// x_t(mu) = argmin C_t(x) - mu x on [-P, P].
class SingleUnitFamily final : public IncrementFamily {
 public:
  SingleUnitFamily(const CostModel& costs, double rate, double eps_x);

  double lower_bracket() const override { return lo_; }
  double upper_bracket() const override { return hi_; }
  std::vector<double> increments(double theta, int first,
                                 int count) const override;

 private:
  const CostModel& costs_;
  double rate_;
  double eps_x_;
  double lo_;
  double hi_;
};

enum class Boundary { Empty, Full, Terminal };

const char* to_string(Boundary b);

enum class BoundMode { AtLeast, AtMost };

class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(int time, const std::string& what)
      : std::runtime_error(what), time_(time) {}
  int time() const { return time_; }

 private:
  int time_;
};

class MonotonicityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MonotonicityViolation {
  int time = 0;
  double theta_lo = 0.0;
  double theta_hi = 0.0;
  double excess = 0.0;
};

/// Where a stage starts and what it must reach.
struct StageWindow {
  int start = 0;
  double start_level = 0.0;
  double capacity = 0.0;
  int horizon = 0;
  double terminal_level = 0.0;
};

struct StageOptions {
  ToleranceSet tol;
  // Strict families throw MonotonicityError on a detected violation; lenient
  // ones record it and bisect on the clamped (monotone envelope) level.
  bool strict_monotone = true;
  // Multiplier of the preceding stage. When the final envelope is a
  // nondegenerate interval the multiplier nearest to it is chosen.
  std::optional<double> previous_theta;
};

struct StageResult {
  double theta_star = 0.0;
  int start = 0;
  int decision = 0;
  int forecast = 0;
  Boundary boundary = Boundary::Terminal;
  std::vector<double> prefix_increments;
  // Distance from the committed level at `decision` to the named boundary.
  double boundary_gap = 0.0;
  std::vector<MonotonicityViolation> violations;
};

struct HorizonReport {
  std::vector<StageResult> stages;
};

/// AtLeast: infimum theta with S_t(theta) >= target. AtMost: supremum theta
/// with S_t(theta) <= target. S_t(theta) = start_level + sum of increments
/// at times start+1..t. Throws InfeasibleError when the brackets cannot
/// reach the target.
double boundary_multiplier(const IncrementFamily& family, int start,
                           double start_level, int t, double target,
                           BoundMode mode, const ToleranceSet& tol);

/// One stage of the horizon algorithm from `window.start`: scans the
/// running envelope [max mu-(u), min mu+(u)] until it empties and commits
/// the prefix up to the decision horizon.
StageResult run_stage(const IncrementFamily& family, const StageWindow& window,
                      const StageOptions& options);

/// Concatenated stages from a start point to the horizon.
struct StagedSolution {
  int start = 0;
  double start_level = 0.0;
  std::vector<double> increments;  // times start+1 .. end
  std::vector<double> thetas;      // stage multiplier per time
  HorizonReport horizons;

  int end() const { return start + static_cast<int>(increments.size()); }
  std::vector<double> levels() const;
};

/// Runs stages until the horizon, or until a decision horizon reaches
/// `until` when it is positive.
StagedSolution solve_with_family(const IncrementFamily& family,
                                 const StageWindow& window,
                                 const StageOptions& options, int until = 0);

struct SingleSolution {
  std::vector<double> levels;       // t = 0..T
  std::vector<double> multipliers;  // t = 1..T
  HorizonReport horizons;
};

SingleSolution solve_single(const SingleUnitProblem& problem);

/// Samples the family on an evenly spaced ladder of `samples` parameters in
/// [theta_lo, theta_hi] and reports every time where an increment decreases
/// by more than `tol` between consecutive rungs.
std::vector<MonotonicityViolation> audit_monotone(
    const IncrementFamily& family, int first, int count, double theta_lo,
    double theta_hi, int samples, double tol);

}  // namespace duostore
