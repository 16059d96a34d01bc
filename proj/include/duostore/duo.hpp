#pragma once

#include <array>
#include <string>
#include <vector>

#include "duostore/core.hpp"
#include "duostore/scalar.hpp"
#include "duostore/stage.hpp"
#include "duostore/verify.hpp"

namespace duostore {

struct UnitOrder {
  StorageUnit unit1;
  StorageUnit unit2;
  bool swapped = false;
  bool equal_ratio = false;
};

/// Unit 1 is the one with the larger E/P ratio.
UnitOrder order_units(const StorageUnit& a, const StorageUnit& b);

/// Copy of the instance with units (and their boundary levels) exchanged.
ProblemInstance swap_units(const ProblemInstance& instance);

/// Order-preserving map of the lexicographic (mu2, kappa2) onto the real
/// line for a fixed mu1: mu2 < mu1 maps to mu2, the tie (mu1, kappa2) to
/// mu1 + kappa2 and mu2 > mu1 to mu2 + 1.
double embed_second(const SecondParam& p, double mu1);
SecondParam unembed_second(double theta, double mu1);

/// Unit-2 increments x2_t(mu1, (mu2, kappa2)) for a fixed mu1, over the
/// embedded lexicographic parameter.
class InnerFamily final : public IncrementFamily {
 public:
  InnerFamily(const ProblemInstance& instance, double mu1);

  double lower_bracket() const override { return lo_; }
  double upper_bracket() const override { return hi_; }
  std::vector<double> increments(double theta, int first,
                                 int count) const override;

  PairIncrement pair(double theta, int t) const;
  double mu1() const { return mu1_; }

 private:
  const ProblemInstance& instance_;
  double mu1_;
  double lo_;
  double hi_;
};

/// Unit-2 single-unit run at fixed mu1 and the unit-1 increments it
/// induces, for times start+1 .. start+x2.size().
struct InnerRun {
  int start = 0;
  double mu1 = 0.0;
  std::vector<double> x1;
  std::vector<double> x2;
  std::vector<SecondParam> nu2;
  HorizonReport unit2;
};

/// Runs the unit-2 stage loop from `start` at fixed mu1 until a decision
/// horizon reaches `until` (or the horizon when `until` <= 0). Unit 2's
/// global terminal level is enforced.
InnerRun inner_solve_unit2(const ProblemInstance& instance, double mu1,
                           int start, std::array<double, 2> start_levels,
                           int until = 0);

/// Induced unit-1 increments as a function of mu1; every evaluation runs
/// the inner unit-2 loop.
class OuterFamily final : public IncrementFamily {
 public:
  OuterFamily(const ProblemInstance& instance, int start,
              std::array<double, 2> start_levels);

  double lower_bracket() const override { return lo_; }
  double upper_bracket() const override { return hi_; }
  std::vector<double> increments(double theta, int first,
                                 int count) const override;

 private:
  const ProblemInstance& instance_;
  int start_;
  std::array<double, 2> levels_;
  double lo_;
  double hi_;
};

struct StateMatch {
  int time = 0;
  Boundary boundary = Boundary::Terminal;
  bool match = true;
  double level2 = 0.0;
};

StateMatch state_match_check(const Strategy& strategy,
                             const ProblemInstance& instance, int tau1,
                             Boundary boundary);

struct Diagnostic {
  enum class Kind { MonotonicityViolation, StateMatchFailure };
  Kind kind = Kind::MonotonicityViolation;
  int time = 0;
  std::string detail;
};

const char* to_string(Diagnostic::Kind kind);

struct SolveResult {
  Strategy strategy;
  MultiplierPath multipliers;
  HorizonReport horizons;                     // unit-1 (outer) stages
  std::vector<HorizonReport> unit2_horizons;  // inner stages per outer stage
  std::vector<StateMatch> state_matches;      // one per outer stage
  std::vector<Diagnostic> diagnostics;
  CertificateReport certificate;
  double cost = 0.0;
  bool reduced = false;  // produced by the equal-ratio reduction
};

/// Nested algorithm; requires E1/P1 >= E2/P2.
SolveResult solve_two(const ProblemInstance& instance);

/// Orders the units, diverts split-consistent equal-ratio instances to the
/// reduction and runs the nested algorithm otherwise. The result is in the
/// ordered frame; `swapped` reports whether the units were exchanged.
SolveResult solve(const ProblemInstance& instance, bool* swapped = nullptr);

double alpha_share(const ProblemInstance& instance);

/// Aggregate unit (E1 + E2, P1 + P2) with summed boundary levels.
SingleUnitProblem aggregate_problem(const ProblemInstance& instance);

/// Equal-ratio instances: solve the aggregate and split proportionally.
SolveResult reduce_equal_ratio(const ProblemInstance& instance);

struct SeparableReport {
  double joint_cost = 0.0;
  double separate_cost = 0.0;  // sum of the two single-unit optima
  double gap = 0.0;            // joint - separate
  double relative_gap = 0.0;
};

SeparableReport near_separable_compare(const ProblemInstance& instance);

/// Forecast horizon in force at each time t = 1..T.
std::vector<int> forecast_by_time(const HorizonReport& report, int horizon);

}  // namespace duostore
