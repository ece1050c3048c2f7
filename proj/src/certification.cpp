#include "idrs/certification.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "idrs/worst_case.hpp"

namespace idrs {

double ClampFunctions::sigma_t(double pb) const {
  double t = base + slope * std::log10(std::clamp(pb, 1e-300, 1.0));
  return std::clamp(t, 0.2, 1.0 - 1e-6);
}

double ClampFunctions::sigma_T(double pb) const { return 1.0 / sigma_t(pb); }

ClampFunctions default_clamps(int dof) {
  if (dof < 1) throw std::domain_error("default_clamps: dof must be >= 1");
  const double ln_lo = std::log(784.0), ln_hi = std::log(3072.0);
  double t = (std::log(static_cast<double>(dof)) - ln_lo) / (ln_hi - ln_lo);
  ClampFunctions c;
  c.base = std::min(0.9988 + 0.0005 * t, 1.0 - 1e-6);
  return c;
}

std::int64_t stride_search(const std::function<bool(std::int64_t)>& certifiable,
                           std::int64_t grid_size, int* evaluations) {
  int evals = 0;
  auto probe = [&](std::int64_t idx) {
    ++evals;
    return certifiable(idx);
  };
  std::int64_t frontier = -1;
  if (grid_size <= 0 || !probe(0)) {
    if (evaluations) *evaluations = evals;
    return frontier;
  }
  frontier = 0;
  // probe indices 1, 4, 9, ... until a failure or the end of the grid
  std::int64_t prev = 0;
  bool failed = false;
  std::int64_t fail_at = grid_size;
  for (std::int64_t i = 1;; ++i) {
    std::int64_t idx = std::min(i * i, grid_size - 1);
    if (idx <= prev) break; // reached the end
    if (!probe(idx)) {
      failed = true;
      fail_at = idx;
      break;
    }
    frontier = idx;
    prev = idx;
    if (idx == grid_size - 1) break;
  }
  if (failed) {
    // bisect (frontier, fail_at): last certified index inside the gap
    std::int64_t lo = frontier, hi = fail_at;
    while (hi - lo > 1) {
      std::int64_t mid = lo + (hi - lo) / 2;
      if (probe(mid))
        lo = mid;
      else
        hi = mid;
    }
    frontier = lo;
  }
  if (evaluations) *evaluations = evals;
  return frontier;
}

namespace {

// Probability of the worst-case runner-up region at distance a when both
// points share the same sigma: the classic half-space case.
double halfspace_prob(double a, double sigma, double pb) {
  return normal_cdf(normal_quantile(pb) + a / sigma);
}

struct XiEval {
  bool certified = false;
  bool unstable = false;
  bool approx = false;
};

XiEval eval_grid_point(double radius, double sigma0, double rate, int dof, double pb,
                       const RadiusSearchConfig& search, const ClampFunctions& clamps,
                       RadiusDiagnostics& diag) {
  XiEval out;
  double lo_env = sigma0 * std::exp(-rate * radius);
  double hi_env = sigma0 * std::exp(rate * radius);
  double lo = lo_env, hi = hi_env;
  if (search.use_clamps) {
    double lo_cap = clamps.sigma_t(pb) * sigma0;
    double hi_cap = clamps.sigma_T(pb) * sigma0;
    if (lo_cap < lo_env) diag.clamp_hit = true;
    lo = std::min(lo_cap, lo_env);
    hi = std::max(hi_cap, hi_env);
  }
  try {
    double xi_lo, xi_hi;
    if (lo == sigma0) { // rate 0 or clampless zero radius
      xi_lo = halfspace_prob(radius, sigma0, pb);
    } else {
      auto r = xi_greater_ex(AdversaryPair{sigma0, lo, radius, dof, 1.0 - pb, pb}, search.ncchsq);
      if (r.worst_path == NcChiSqPath::MomentApprox) out.approx = true;
      xi_lo = r.value;
    }
    if (hi == sigma0) {
      xi_hi = halfspace_prob(radius, sigma0, pb);
    } else {
      auto r = xi_less_ex(AdversaryPair{sigma0, hi, radius, dof, 1.0 - pb, pb}, search.ncchsq);
      if (r.worst_path == NcChiSqPath::MomentApprox) out.approx = true;
      xi_hi = r.value;
    }
    if (!std::isfinite(xi_lo) || !std::isfinite(xi_hi)) {
      out.unstable = true;
      return out;
    }
    out.certified = xi_lo < 0.5 && xi_hi < 0.5;
  } catch (const UnstableRegimeError&) {
    out.unstable = true;
  }
  return out;
}

} // namespace

IdrsRadius idrs_certified_radius(double sigma0, double rate, int dof, double pa_lower,
                                 double pb_upper, const RadiusSearchConfig& search) {
  if (!(sigma0 > 0.0)) throw std::domain_error("idrs_certified_radius: sigma0 must be positive");
  if (!(rate >= 0.0)) throw std::domain_error("idrs_certified_radius: rate must be >= 0");
  if (dof < 1) throw std::domain_error("idrs_certified_radius: dof must be >= 1");
  if (!(pa_lower > 0.0 && pa_lower < 1.0))
    throw std::domain_error("idrs_certified_radius: pa_lower must be in (0,1)");
  if (search.num_steps < 2) throw std::domain_error("idrs_certified_radius: num_steps must be >= 2");

  IdrsRadius out;
  if (pa_lower <= 0.5) {
    out.diag.notes.push_back("pa_lower <= 0.5: nothing to certify");
    return out;
  }
  if (!(pb_upper > 0.0 && pb_upper <= 1.0))
    throw std::domain_error("idrs_certified_radius: pb_upper must be in (0,1]");
  if (rate == 0.0) {
    // both envelope extremes collapse onto sigma0: the half-space case
    out.radius = pb_upper < 1.0 ? cohen_radius(pa_lower, pb_upper, sigma0) : 0.0;
    return out;
  }
  if (!(pb_upper < 0.5)) {
    out.diag.notes.push_back("pb_upper >= 0.5: nothing to certify");
    return out;
  }

  const double cohen = cohen_radius(pa_lower, pb_upper, sigma0);
  const double r_max = search.max_radius_factor * cohen;
  if (!(r_max > 0.0)) return out;

  const double step = r_max / static_cast<double>(search.num_steps - 1);
  out.diag.grid_step = step;
  ClampFunctions clamps = search.auto_clamps ? default_clamps(dof) : search.clamps;

  auto certifiable = [&](std::int64_t idx) {
    double radius = static_cast<double>(idx) * step;
    auto ev = eval_grid_point(radius, sigma0, rate, dof, pb_upper, search, clamps, out.diag);
    if (ev.unstable) ++out.diag.unstable_points;
    if (ev.approx) out.diag.approx_path_used = true;
    return ev.certified && !ev.unstable;
  };
  int evals = 0;
  std::int64_t frontier = stride_search(certifiable, search.num_steps, &evals);
  out.diag.evaluations = evals;
  out.radius = frontier <= 0 ? 0.0 : static_cast<double>(frontier) * step;
  return out;
}

std::vector<std::string> clamp_stability_scan(int dof, const std::vector<double>& pa_values,
                                              const ClampFunctions& clamps) {
  std::vector<std::string> complaints;
  for (double pa : pa_values) {
    if (!(pa > 0.5 && pa < 1.0)) {
      complaints.push_back("pa outside (0.5, 1)");
      continue;
    }
    double pb = 1.0 - pa;
    for (bool shrinking : {true, false}) {
      double sig1 = shrinking ? clamps.sigma_t(pb) : clamps.sigma_T(pb);
      double prev = -1.0;
      for (int i = 0; i <= 32; ++i) {
        double a = 0.15 * i;
        double v;
        try {
          AdversaryPair pair{1.0, sig1, a, dof, pa, pb};
          v = shrinking ? xi_greater(pair) : xi_less(pair);
        } catch (const UnstableRegimeError& e) {
          complaints.push_back("unstable at pa=" + std::to_string(pa) + ": " + e.what());
          break;
        }
        if (!std::isfinite(v)) {
          complaints.push_back("non-finite probability at pa=" + std::to_string(pa));
          break;
        }
        if (v < prev - 1e-9) {
          complaints.push_back("non-monotone curve at pa=" + std::to_string(pa));
          break;
        }
        prev = v;
      }
    }
  }
  return complaints;
}

CertificationResult certify_point(const BaseClassifier& f, const SigmaField& field,
                                  std::span<const double> x0, const SmoothingConfig& cfg,
                                  const RadiusSearchConfig& search, std::uint64_t point_id) {
  if (f.dim() != field.dim()) throw std::invalid_argument("certify_point: dimension mismatch");
  CertificationResult res;
  res.method = CertMethod::Idrs;
  res.sigma0 = field.sigma_at(x0);
  auto est = estimate_pa(f, res.sigma0, x0, cfg, point_id);
  res.pa_lower = est.pa_lower;
  res.pb_upper = est.pb_upper;
  if (est.pa_lower <= 0.5) {
    res.predicted = kAbstain;
    res.radius = 0.0;
    return res;
  }
  res.predicted = est.top_class;
  auto r = idrs_certified_radius(res.sigma0, field.rate(), f.dim(), res.pa_lower, res.pb_upper,
                                 search);
  res.radius = r.radius;
  res.diag = std::move(r.diag);
  return res;
}

CertificationResult certify_point_constant(const BaseClassifier& f, double sigma,
                                           std::span<const double> x0, const SmoothingConfig& cfg,
                                           std::uint64_t point_id) {
  CertificationResult res;
  res.method = CertMethod::CohenConstant;
  res.sigma0 = sigma;
  auto est = estimate_pa(f, sigma, x0, cfg, point_id);
  res.pa_lower = est.pa_lower;
  res.pb_upper = est.pb_upper;
  if (est.pa_lower <= 0.5) {
    res.predicted = kAbstain;
    res.radius = 0.0;
    return res;
  }
  res.predicted = est.top_class;
  res.radius = cohen_radius(res.pa_lower, res.pb_upper, sigma);
  return res;
}

} // namespace idrs
