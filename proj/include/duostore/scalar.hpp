#pragma once

#include <compare>
#include <vector>

#include "duostore/core.hpp"

namespace duostore {

/// Second component (mu2, kappa2) of an enlarged parameter. The defaulted
/// comparison is lexicographic: mu2 first, then kappa2.
struct SecondParam {
  double mu2 = 0.0;
  double kappa2 = 0.0;

  auto operator<=>(const SecondParam&) const = default;
};

/// Enlarged parameter nu = (mu1, (mu2, kappa2)), kappa2 in [0, 1].
struct EnlargedParam {
  double mu1 = 0.0;
  SecondParam second;
};

/// Per-time multipliers of a two-unit strategy.
struct MultiplierPath {
  std::vector<double> mu1;
  std::vector<SecondParam> nu2;
};

/// The segment {x1 + x2 = gamma} inside the rate box that minimizes
/// C_t(x1 + x2) - mu (x1 + x2).
struct TieSegment {
  double gamma_star = 0.0;
  double x1_min = 0.0;
  double x1_max = 0.0;

  double x2_min() const { return gamma_star - x1_max; }
  double x2_max() const { return gamma_star - x1_min; }
};

struct PairIncrement {
  double x1 = 0.0;
  double x2 = 0.0;
};

/// Unique argmin of C_t(x) - mu x on [-rate, rate].
double xhat_single(const CostModel& costs, int t, double mu, double rate,
                   double eps_x);

TieSegment tie_segment(const CostModel& costs, int t, double mu, double rate1,
                       double rate2, double eps_x);

/// Minimizer of C_t(x1 + x2) - mu1 x1 - mu2 x2 over the rate box assigned to
/// nu. kappa2 only matters when mu1 == mu2, where it interpolates along the
/// tie segment from (x1_max, x2_min) at 0 to (x1_min, x2_max) at 1.
PairIncrement xhat_pair(const CostModel& costs, int t,
                        const EnlargedParam& nu, double rate1, double rate2,
                        double eps_x);

double pair_objective(const CostModel& costs, int t, double mu1, double mu2,
                      double x1, double x2);

/// Multiplier range that saturates every x-hat map on [-bound, bound]:
/// below `lo` every minimizer sits at -bound, above `hi` at +bound.
struct MultiplierBracket {
  double lo = 0.0;
  double hi = 0.0;
};

MultiplierBracket saturation_bracket(const CostModel& costs, double bound);

}  // namespace duostore
