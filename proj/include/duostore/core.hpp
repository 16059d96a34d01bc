#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace duostore {

/// A storage unit: energy capacity E (MWh) and power rate P (MWh per step).
struct StorageUnit {
  double capacity = 0.0;
  double rate = 0.0;

  double ratio() const { return capacity / rate; }
};

/// One user-supplied cost function C_t. Derivatives are optional; when
/// missing they are replaced by one-sided finite differences and scalar
/// minimization falls back to golden-section search.
struct ScalarCost {
  std::function<double(double)> value;
  std::function<double(double)> left_derivative;
  std::function<double(double)> right_derivative;
};

/// Per-time cost functions C_t, t = 1..T, of the combined increment.
///
/// The quadratic market-impact form C_t(xi) = (p_t + lambda p_t xi) xi has
/// closed-form minimizers; custom costs go through scalar search.
class CostModel {
 public:
  enum class Kind { QuadraticImpact, Custom };

  CostModel() = default;

  static CostModel quadratic_impact(std::vector<double> prices, double impact);
  static CostModel custom(std::vector<ScalarCost> costs);

  Kind kind() const { return kind_; }
  int horizon() const;

  // t is 1-based throughout.
  double value(int t, double xi) const;
  double left_derivative(int t, double xi) const;
  double right_derivative(int t, double xi) const;

  /// argmin of C_t(x) - mu x over [lo, hi].
  double minimizer(int t, double mu, double lo, double hi, double eps_x) const;

  /// Marginal cost at zero; the price for the quadratic form.
  double reference_price(int t) const;

  const std::vector<double>& prices() const { return prices_; }
  double impact() const { return impact_; }

  CostModel with_prices(std::vector<double> prices) const;

 private:
  Kind kind_ = Kind::QuadraticImpact;
  std::vector<double> prices_;
  double impact_ = 0.0;
  std::vector<ScalarCost> custom_;
};

struct ToleranceSet {
  double eps_mu = 1e-9;
  double eps_x = 1e-9;
  double eps_S = 1e-6;
  double eps_cost = 1e-6;
};

/// Scale-free defaults derived from the cost model, total rate and largest
/// capacity.
ToleranceSet default_tolerances(const CostModel& costs, double total_rate,
                                double max_capacity);

struct ProblemInstance {
  StorageUnit unit1;
  StorageUnit unit2;
  CostModel costs;
  std::array<double, 2> initial_levels{};
  std::array<double, 2> final_levels{};
  ToleranceSet tolerances;

  int horizon() const { return costs.horizon(); }
  double total_rate() const { return unit1.rate + unit2.rate; }
  const StorageUnit& unit(int j) const { return j == 0 ? unit1 : unit2; }
};

/// Builds an instance with default tolerances.
ProblemInstance make_instance(StorageUnit unit1, StorageUnit unit2,
                              CostModel costs,
                              std::array<double, 2> initial_levels,
                              std::array<double, 2> final_levels);

/// Single unit facing the cost model alone, on the domain [-P, P].
struct SingleUnitProblem {
  StorageUnit unit;
  CostModel costs;
  double initial_level = 0.0;
  double final_level = 0.0;
  ToleranceSet tolerances;

  int horizon() const { return costs.horizon(); }
};

SingleUnitProblem make_single(StorageUnit unit, CostModel costs,
                              double initial_level, double final_level);

/// Levels S_{j,t}, t = 0..T, for both units.
struct Strategy {
  std::vector<double> levels1;
  std::vector<double> levels2;

  int horizon() const { return static_cast<int>(levels1.size()) - 1; }
  const std::vector<double>& levels(int j) const {
    return j == 0 ? levels1 : levels2;
  }
};

std::vector<double> increments_of(std::span<const double> levels);
std::vector<double> levels_from(double start, std::span<const double> increments);

/// Largest violation (energy units) of the capacity, boundary and rate
/// constraints.
double feasibility_violation(std::span<const double> levels,
                             const StorageUnit& unit, double initial_level,
                             double final_level);
double feasibility_violation(const Strategy& strategy,
                             const ProblemInstance& instance);
bool feasible(const Strategy& strategy, const ProblemInstance& instance,
              double eps);

/// Sum over t of C_t(x_{1,t} + x_{2,t}). Throws std::domain_error when a
/// combined increment leaves [-(P1+P2), P1+P2].
double total_cost(const Strategy& strategy, const ProblemInstance& instance);
double single_cost(std::span<const double> levels, const CostModel& costs);

struct ValidationReport {
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
  std::string summary() const;
};

ValidationReport validate_instance(const ProblemInstance& instance);
ValidationReport validate_single(const SingleUnitProblem& problem);

}  // namespace duostore
