#pragma once

#include <optional>
#include <vector>

namespace idrs {

// Feasibility limits on the noise ratio sigma1/sigma0 as the dimension grows.

struct ThresholdQuery {
  int dof = 2;     // ambient dimension N
  double pA = 0.9; // leading-class probability, in (0.5, 1)
};

// True when no adversary using sigma1 = ratio * sigma0 < sigma0 is
// certifiable at any distance: log(t^2) + 1 - t^2 < 2 log(1-pA) / N.
bool is_hopeless_greater(double ratio, const ThresholdQuery& query);

// The mirrored condition for inflated noise (ratio > 1), with the (N-1)/N
// correction; requires N >= 2.
bool is_hopeless_less(double ratio, const ThresholdQuery& query);

// Largest ratio in (0,1) satisfying the shrinking-noise condition with
// equality; ratios below it are hopeless. Bisection to 1e-9.
double theoretical_threshold(const ThresholdQuery& query);

// Smallest ratio above 1 at which the inflated-noise condition starts to
// hold; ratios above it are hopeless.
double theoretical_threshold_less(const ThresholdQuery& query);

// Closed-form necessary bound sqrt(1 - 2 sqrt(-log(1-pA)/N)). Empty when the
// inner expression is non-positive: every shrinking ratio is hopeless.
std::optional<double> closed_form_threshold(const ThresholdQuery& query);

// Ratio at which the worst-case runner-up probability at distance zero
// crosses 0.5, found numerically. Always >= the theoretical threshold.
double practical_threshold(const ThresholdQuery& query);

// 1/sqrt(N) scaling of the admissible relative noise variation
// sqrt(-log(pB)) / (c sqrt(N)), for a unit distance-scale constant.
std::vector<double> max_ratio_variation_scaling(const std::vector<int>& dims, double pB,
                                                double c);

} // namespace idrs
