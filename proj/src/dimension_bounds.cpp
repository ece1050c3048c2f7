#include "idrs/dimension_bounds.hpp"

#include <cmath>
#include <stdexcept>

#include "idrs/special_fns.hpp"

namespace idrs {

namespace {

void validate(const ThresholdQuery& q) {
  if (q.dof < 1) throw std::domain_error("ThresholdQuery: dof must be >= 1");
  if (!(q.pA > 0.5 && q.pA < 1.0)) throw std::domain_error("ThresholdQuery: pA must be in (0.5, 1)");
}

double rhs(const ThresholdQuery& q) { return 2.0 * std::log1p(-q.pA) / q.dof; }

// Bisection for a monotone predicate: smallest t in (lo, hi) with pred(t) true.
template <typename Pred>
double bisect_first_true(double lo, double hi, const Pred& pred, double tol) {
  for (int i = 0; i < 200 && hi - lo > tol; ++i) {
    double mid = 0.5 * (lo + hi);
    if (pred(mid))
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

} // namespace

bool is_hopeless_greater(double ratio, const ThresholdQuery& query) {
  validate(query);
  if (!(ratio > 0.0 && ratio < 1.0)) throw std::domain_error("is_hopeless_greater: ratio must be in (0,1)");
  double t2 = ratio * ratio;
  return std::log(t2) + 1.0 - t2 < rhs(query);
}

bool is_hopeless_less(double ratio, const ThresholdQuery& query) {
  validate(query);
  if (query.dof < 2) throw std::domain_error("is_hopeless_less: needs dof >= 2");
  if (!(ratio > 1.0)) throw std::domain_error("is_hopeless_less: ratio must be > 1");
  double w = ratio * ratio * (query.dof - 1.0) / query.dof;
  return std::log(w) + 1.0 - w < rhs(query);
}

double theoretical_threshold(const ThresholdQuery& query) {
  validate(query);
  // log(t^2)+1-t^2 is increasing on (0,1); hopeless exactly below the root.
  return bisect_first_true(
      1e-6, 1.0 - 1e-9, [&](double t) { return !is_hopeless_greater(t, query); }, 1e-9);
}

double theoretical_threshold_less(const ThresholdQuery& query) {
  validate(query);
  if (query.dof < 2) throw std::domain_error("theoretical_threshold_less: needs dof >= 2");
  double hi = 2.0;
  while (!is_hopeless_less(hi, query)) {
    hi *= 2.0;
    if (hi > 1e9) throw std::runtime_error("theoretical_threshold_less: no bracket");
  }
  return bisect_first_true(
      1.0 + 1e-12, hi, [&](double t) { return is_hopeless_less(t, query); }, 1e-9);
}

std::optional<double> closed_form_threshold(const ThresholdQuery& query) {
  validate(query);
  double inner = 1.0 - 2.0 * std::sqrt(-std::log1p(-query.pA) / query.dof);
  if (inner <= 0.0) return std::nullopt; // every shrinking ratio is hopeless
  return std::sqrt(inner);
}

double practical_threshold(const ThresholdQuery& query) {
  validate(query);
  const NcChiSq central{query.dof, 0.0};
  const double q = ncchsq_quantile(central, 1.0 - query.pA);
  auto xi0 = [&](double t) { return ncchsq_cdf(central, q / (t * t)); };

  const double lo = 1e-6, hi = 1.0 - 1e-9;
  if (!(xi0(lo) > 0.5 && xi0(hi) < 0.5))
    throw std::runtime_error("practical_threshold: root not bracketed");
  // xi0 decreases in t; find where it crosses 0.5.
  return bisect_first_true(lo, hi, [&](double t) { return xi0(t) < 0.5; }, 1e-9);
}

std::vector<double> max_ratio_variation_scaling(const std::vector<int>& dims, double pB,
                                                double c) {
  if (dims.empty()) throw std::domain_error("max_ratio_variation_scaling: dims must be nonempty");
  if (!(pB > 0.0 && pB < 1.0)) throw std::domain_error("max_ratio_variation_scaling: pB in (0,1)");
  if (!(c > 0.0)) throw std::domain_error("max_ratio_variation_scaling: c must be positive");
  std::vector<double> out;
  out.reserve(dims.size());
  for (int n : dims) {
    if (n < 1) throw std::domain_error("max_ratio_variation_scaling: dims must be positive");
    out.push_back(std::sqrt(-std::log(pB)) / (c * std::sqrt(static_cast<double>(n))));
  }
  return out;
}

} // namespace idrs
