#pragma once

#include <span>
#include <vector>

#include "idrs/special_fns.hpp"

namespace idrs {

// Neyman-Pearson worst-case runner-up decision region between N(x0, s0^2 I)
// and N(x1, s1^2 I): a ball when the adversary's noise is smaller, the
// complement of a ball when it is larger.

enum class BallOrientation { Ball, ComplementOfBall };

struct WorstCaseBall {
  std::vector<double> center;
  double radius = 0.0; // clamped to 0 when the likelihood level empties the set
  BallOrientation orientation = BallOrientation::Ball;
};

// Region {x : q1(x)/q0(x) >= 1/likelihood_level}. Requires sigma0 != sigma1
// (equal sigmas give a half-space and are handled by the constant-sigma path).
WorstCaseBall worst_case_ball(std::span<const double> x0, std::span<const double> x1,
                              double sigma0, double sigma1, double likelihood_level);

// Mass of the region under N(mean, sigma^2 I), exact through the noncentral
// chi-squared CDF.
double ball_probability_exact(std::span<const double> mean, double sigma,
                              const WorstCaseBall& ball);

// One certify-vs-adversary configuration. pB is the runner-up probability
// bound: 1 - pA unless a separately estimated bound is supplied.
struct AdversaryPair {
  double sigma0 = 1.0;   // noise used at the certified point
  double sigma1 = 1.0;   // noise used at the adversary
  double distance = 0.0; // ||x1 - x0||
  int dof = 1;           // ambient dimension N
  double pA = 0.9;
  double pB = 0.1;
};

AdversaryPair make_pair_complement(double sigma0, double sigma1, double distance, int dof,
                                   double pA);

struct XiResult {
  double value = 0.0;
  NcChiSqPath worst_path = NcChiSqPath::Central; // approximation anywhere taints the result
  bool underflowed = false;
};

// Worst-case runner-up probability at the adversary, computed by direct
// quantile-then-CDF substitution. xi_greater requires sigma0 > sigma1,
// xi_less requires sigma0 < sigma1.
XiResult xi_greater_ex(const AdversaryPair& pair, const NcChiSqOptions& opt = {});
XiResult xi_less_ex(const AdversaryPair& pair, const NcChiSqOptions& opt = {});
double xi_greater(const AdversaryPair& pair);
double xi_less(const AdversaryPair& pair);

// Exact class-1 probability of the ball-indicator base classifier under
// N(x, sigma^2 I) smoothing.
double smoothed_ball_indicator_exact(std::span<const double> x, double sigma,
                                     std::span<const double> ball_center, double ball_radius);

} // namespace idrs
