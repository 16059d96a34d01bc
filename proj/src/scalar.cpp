#include "duostore/scalar.hpp"

#include <algorithm>
#include <limits>

namespace duostore {

double xhat_single(const CostModel& costs, int t, double mu, double rate,
                   double eps_x) {
  return costs.minimizer(t, mu, -rate, rate, eps_x);
}

TieSegment tie_segment(const CostModel& costs, int t, double mu, double rate1,
                       double rate2, double eps_x) {
  TieSegment seg;
  const double bound = rate1 + rate2;
  seg.gamma_star = costs.minimizer(t, mu, -bound, bound, eps_x);
  seg.x1_min = std::max(-rate1, seg.gamma_star - rate2);
  seg.x1_max = std::min(rate1, seg.gamma_star + rate2);
  return seg;
}

PairIncrement xhat_pair(const CostModel& costs, int t,
                        const EnlargedParam& nu, double rate1, double rate2,
                        double eps_x) {
  const double mu1 = nu.mu1;
  const double mu2 = nu.second.mu2;
  if (mu1 == mu2) {
    const TieSegment seg = tie_segment(costs, t, mu1, rate1, rate2, eps_x);
    const double k = std::clamp(nu.second.kappa2, 0.0, 1.0);
    PairIncrement x;
    x.x1 = (1.0 - k) * seg.x1_max + k * seg.x1_min;
    x.x2 = (1.0 - k) * seg.x2_min() + k * seg.x2_max();
    return x;
  }
  // With xi = x1 + x2 fixed, the better-paid unit takes as much of xi as its
  // rate allows, so h(xi) = C_t(xi) - mu_lo xi - (mu_hi - mu_lo) min(P_hi,
  // xi + P_lo). h' equals C_t' - mu_hi while the better-paid unit is below
  // its rate and C_t' - mu_lo after, so the minimizer splits into two clamped
  // marginal inverses on the combined domain.
  const double bound = rate1 + rate2;
  const double d1 = costs.minimizer(t, mu1, -bound, bound, eps_x);
  const double d2 = costs.minimizer(t, mu2, -bound, bound, eps_x);
  PairIncrement x;
  if (mu1 > mu2) {
    x.x1 = std::clamp(d1 + rate2, -rate1, rate1);
    x.x2 = std::clamp(d2 - rate1, -rate2, rate2);
  } else {
    x.x1 = std::clamp(d1 - rate2, -rate1, rate1);
    x.x2 = std::clamp(d2 + rate1, -rate2, rate2);
  }
  return x;
}

double pair_objective(const CostModel& costs, int t, double mu1, double mu2,
                      double x1, double x2) {
  return costs.value(t, x1 + x2) - mu1 * x1 - mu2 * x2;
}

MultiplierBracket saturation_bracket(const CostModel& costs, double bound) {
  MultiplierBracket b{std::numeric_limits<double>::infinity(),
                      -std::numeric_limits<double>::infinity()};
  for (int t = 1; t <= costs.horizon(); ++t) {
    b.lo = std::min(b.lo, costs.right_derivative(t, -bound));
    b.hi = std::max(b.hi, costs.left_derivative(t, bound));
  }
  b.lo -= 1.0;
  b.hi += 1.0;
  return b;
}

}  // namespace duostore
