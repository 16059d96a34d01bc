#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "duostore/core.hpp"
#include "duostore/scalar.hpp"

namespace duostore {

/// Outcome of checking the three sufficient conditions: feasibility,
/// pointwise minimization of C_t(x1 + x2) - mu1 x1 - mu2 x2 over the rate
/// box, and complementary slackness of the multipliers.
struct CertificateReport {
  bool feasible = false;
  double max_violation = 0.0;

  bool minimization_ok = false;
  double worst_gap = 0.0;  // objective above the 201 x 201 grid minimum
  double worst_kkt = 0.0;  // stationarity residual times rate (currency)
  int worst_time = 0;

  bool slackness_ok = false;
  std::vector<std::pair<int, int>> slackness_violations;  // (unit, t)

  bool overall = false;
};

CertificateReport certify(const Strategy& strategy,
                          const MultiplierPath& multipliers,
                          const ProblemInstance& instance,
                          const ToleranceSet& tol);

/// Same three conditions for one unit; `levels` has T + 1 entries.
CertificateReport certify_single(const std::vector<double>& levels,
                                 const std::vector<double>& multipliers,
                                 const SingleUnitProblem& problem);

class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(double required, double budget);
  double required() const { return required_; }

 private:
  double required_;
};

inline constexpr double kDefaultOracleBudget = 4e9;

struct OracleResult {
  double cost = 0.0;
  Strategy strategy;
  double delta1 = 0.0;
  double delta2 = 0.0;
};

/// Exact minimum over strategies whose levels sit on the grids
/// {0, delta_j, ..., E_j}. Boundary levels and capacities must lie on the
/// grid. The work estimate T (E1/d1+1)(E2/d2+1)(2 P1/d1+1)(2 P2/d2+1) must
/// not exceed `budget`.
OracleResult oracle_dp(const ProblemInstance& instance, double delta1,
                       double delta2, double budget = kDefaultOracleBudget);

struct SingleOracleResult {
  double cost = 0.0;
  std::vector<double> levels;
};

SingleOracleResult oracle_dp_single(const SingleUnitProblem& problem,
                                    double delta,
                                    double budget = kDefaultOracleBudget);

struct GapReport {
  double cost_alg = 0.0;
  double cost_dp = 0.0;
  double gap = 0.0;    // cost_alg - cost_dp
  double bound = 0.0;  // Lip * delta * T
  bool beats_grid = false;
  bool within_bound = false;

  bool ok() const { return beats_grid && within_bound; }
};

/// Lip = max_t C_t'(P1 + P2).
double cost_lipschitz(const ProblemInstance& instance);

GapReport compare(double cost_alg, const OracleResult& oracle,
                  const ProblemInstance& instance);

/// Worker count for parallel loops: DUOSTORE_THREADS when set, otherwise
/// the hardware concurrency.
unsigned worker_threads();

}  // namespace duostore
