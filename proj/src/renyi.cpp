#include "idrs/renyi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace idrs {

namespace {

constexpr double kAlphaGuard = 1e-6; // exclusion band around alpha = 1

// Power mean of order p over {a, b}, evaluated in log space so that large
// negative orders stay finite.
double power_mean(double a, double b, double p) {
  if (p == 0.0) return std::sqrt(a * b);
  double la = p * std::log(a), lb = p * std::log(b);
  double m = std::max(la, lb);
  double lse = m + std::log(0.5 * (std::exp(la - m) + std::exp(lb - m)));
  return std::exp(lse / p);
}

void validate_probs(double pA, double pB) {
  if (!(pA > 0.0 && pA < 1.0 && pB > 0.0 && pB < 1.0))
    throw std::domain_error("renyi: probabilities must be in (0,1)");
  if (pA < pB) throw std::domain_error("renyi: needs pA >= pB");
  if (pA + pB > 1.0 + 1e-12) throw std::domain_error("renyi: needs pA + pB <= 1");
}

} // namespace

bool renyi_alpha_admissible(double sigma0, double sigma1, double alpha) {
  if (!(alpha > 0.0) || std::fabs(alpha - 1.0) < kAlphaGuard) return false;
  if (sigma0 >= sigma1) return true;
  return alpha <= sigma1 * sigma1 / (sigma1 * sigma1 - sigma0 * sigma0);
}

double renyi_divergence_isotropic(double sigma0, double sigma1, int dof, double alpha,
                                  double distance) {
  if (!(sigma0 > 0.0 && sigma1 > 0.0)) throw std::domain_error("renyi: sigmas must be positive");
  if (dof < 1) throw std::domain_error("renyi: dof must be >= 1");
  if (!(distance >= 0.0)) throw std::domain_error("renyi: distance must be >= 0");
  if (!renyi_alpha_admissible(sigma0, sigma1, alpha))
    throw std::domain_error("renyi: alpha outside the admissible set");

  const double s02 = sigma0 * sigma0, s12 = sigma1 * sigma1;
  const double sa2 = (1.0 - alpha) * s12 + alpha * s02; // = 2 sa^2 / 2
  const double mean_term = alpha * distance * distance / (2.0 * sa2);
  const double n = static_cast<double>(dof);
  const double var_term =
      n * (0.5 * std::log(sa2 / s12)) / (1.0 - alpha) -
      n * (alpha / (1.0 - alpha)) * std::log(sigma0 / sigma1);
  return mean_term + var_term;
}

double li_condition_rhs(double pA, double pB, double alpha) {
  validate_probs(pA, pB);
  if (std::fabs(alpha - 1.0) < kAlphaGuard) throw std::domain_error("li_condition_rhs: alpha != 1");
  double m1 = 0.5 * (pA + pB);
  double mm = power_mean(pA, pB, 1.0 - alpha);
  double arg = 1.0 - 2.0 * m1 + 2.0 * mm;
  if (!(arg > 0.0)) return 0.0; // no budget
  return -std::log(arg);
}

namespace {

// Certified radius squared at a fixed admissible order, or -inf.
double radius_sq_at(const RenyiQuery& q, double alpha) {
  if (!renyi_alpha_admissible(q.sigma0, q.sigma1, alpha))
    return -std::numeric_limits<double>::infinity();
  const double s02 = q.sigma0 * q.sigma0, s12 = q.sigma1 * q.sigma1;
  const double sa2 = (1.0 - alpha) * s12 + alpha * s02;
  if (!(sa2 > 0.0)) return -std::numeric_limits<double>::infinity();
  const double n = static_cast<double>(q.dof);
  double budget = li_condition_rhs(q.pA, q.pB, alpha);
  double penalty = n * (alpha / (1.0 - alpha)) * std::log(q.sigma0 / q.sigma1) -
                   n * (0.5 * std::log(sa2 / s12)) / (1.0 - alpha);
  return (2.0 * sa2 / alpha) * (penalty + budget);
}

} // namespace

double renyi_certified_radius(const RenyiQuery& q) {
  validate_probs(q.pA, q.pB);
  if (!(q.sigma0 > 0.0 && q.sigma1 > 0.0)) throw std::domain_error("renyi: sigmas must be positive");
  if (q.dof < 1) throw std::domain_error("renyi: dof must be >= 1");
  int grid = std::max(8, q.alpha_grid_points);

  double alpha_max = 1e6;
  if (q.sigma1 > q.sigma0)
    alpha_max = q.sigma1 * q.sigma1 / (q.sigma1 * q.sigma1 - q.sigma0 * q.sigma0);
  const double lo = std::log(1e-6), hi = std::log(alpha_max);

  double best = -std::numeric_limits<double>::infinity();
  double best_log = lo;
  for (int i = 0; i < grid; ++i) {
    double la = lo + (hi - lo) * i / (grid - 1);
    double v = radius_sq_at(q, std::exp(la));
    if (v > best) {
      best = v;
      best_log = la;
    }
  }
  // golden-section refinement around the best grid point
  double span = (hi - lo) / (grid - 1);
  double a = best_log - span, b = best_log + span;
  const double invphi = 0.6180339887498949;
  double c = b - invphi * (b - a), d = a + invphi * (b - a);
  for (int it = 0; it < 60; ++it) {
    if (radius_sq_at(q, std::exp(c)) >= radius_sq_at(q, std::exp(d)))
      b = d;
    else
      a = c;
    c = b - invphi * (b - a);
    d = a + invphi * (b - a);
  }
  best = std::max(best, radius_sq_at(q, std::exp(0.5 * (a + b))));
  return best > 0.0 ? std::sqrt(best) : 0.0;
}

} // namespace idrs
