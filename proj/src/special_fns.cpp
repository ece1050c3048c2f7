#include "idrs/special_fns.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace idrs {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kInvSqrt2Pi = 0.3989422804014327;
constexpr int kMaxSeriesIter = 10'000'000;

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw UnstableRegimeError(std::string(what) + " is not finite");
}

} // namespace

double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / kSqrt2);
}

double normal_pdf(double x) {
  return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal_quantile: p must be in (0,1)");

  // Acklam's rational approximation (relative error < 1.15e-9).
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    double q = p - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // One Halley step against the exact erfc-based CDF.
  double e = normal_cdf(x) - p;
  double u = e / normal_pdf(x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

// ----------------------------------------------------------------------------
// Incomplete gamma
// ----------------------------------------------------------------------------

namespace {

// Stirling remainder lgamma(s+1) - ((s+1/2) log s - s + log(2 pi)/2).
double stirling_delta(double s) {
  if (s < 15.0)
    return std::lgamma(s + 1.0) - ((s + 0.5) * std::log(s) - s + 0.5 * std::log(2.0 * M_PI));
  double is2 = 1.0 / (s * s);
  return (1.0 / (12.0 * s)) *
         (1.0 - (is2 / 30.0) * (1.0 - (2.0 * is2 / 7.0) * (1.0 - 0.75 * is2)));
}

// s log y - y - lgamma(s+1), evaluated without the catastrophic cancellation
// the naive three-term form suffers when s and y are large and close.
double log_gamma_term(double s, double y) {
  if (s == 0.0) return -y;
  if (s < 15.0) return s * std::log(y) - y - std::lgamma(s + 1.0);
  double v = (y - s) / s;
  return s * (std::log1p(v) - v) - 0.5 * std::log(2.0 * M_PI * s) - stirling_delta(s);
}

// Series representation, valid (and fastest) for x < a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < kMaxSeriesIter; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-15) {
      // x^a e^{-x} / Gamma(a) = exp(log_gamma_term(a, x)) * a
      return sum * std::exp(log_gamma_term(a, x) + std::log(a));
    }
  }
  throw UnstableRegimeError("incomplete gamma series did not converge: a=" + std::to_string(a) + " x=" + std::to_string(x));
}

// Modified Lentz continued fraction for Q(a,x), valid for x >= a + 1.
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxSeriesIter; ++i) {
    double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-15) {
      return h * std::exp(log_gamma_term(a, x) + std::log(a));
    }
  }
  throw UnstableRegimeError("incomplete gamma continued fraction did not converge: a=" + std::to_string(a) + " x=" + std::to_string(x));
}

} // namespace

double lower_gamma_regularized(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw std::domain_error("lower_gamma_regularized: need a > 0, x >= 0");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_cf(a, x);
}

double upper_gamma_regularized(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw std::domain_error("upper_gamma_regularized: need a > 0, x >= 0");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

// ----------------------------------------------------------------------------
// Incomplete beta
// ----------------------------------------------------------------------------

namespace {

double beta_cf(double x, double a, double b) {
  const double tiny = 1e-300;
  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m < kMaxSeriesIter; ++m) {
    double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-15) return h;
  }
  throw UnstableRegimeError("incomplete beta continued fraction did not converge");
}

} // namespace

double regularized_incomplete_beta(double x, double a, double b) {
  if (!(a > 0.0 && b > 0.0) || x < 0.0 || x > 1.0)
    throw std::domain_error("regularized_incomplete_beta: bad arguments");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  double lbeta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  double front = std::exp(a * std::log(x) + b * std::log1p(-x) - lbeta);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(x, a, b) / a;
  return 1.0 - front * beta_cf(1.0 - x, b, a) / b;
}

// ----------------------------------------------------------------------------
// Noncentral chi-squared
// ----------------------------------------------------------------------------

namespace {

void validate(const NcChiSq& dist) {
  if (dist.dof < 1) throw std::domain_error("NcChiSq: dof must be >= 1");
  if (dist.noncentrality < 0.0) throw std::domain_error("NcChiSq: noncentrality must be >= 0");
  require_finite(dist.noncentrality, "NcChiSq noncentrality");
}

// Cube-root moment match (Sankaran): chi2_N(lambda, x) ~ Phi(z(x)).
double sankaran_cdf(double dof, double lambda, double x) {
  double s = dof + lambda;
  double h = 1.0 - (2.0 / 3.0) * s * (dof + 3.0 * lambda) / ((dof + 2.0 * lambda) * (dof + 2.0 * lambda));
  double p = (dof + 2.0 * lambda) / (s * s);
  double m = (h - 1.0) * (1.0 - 3.0 * h);
  double num = std::pow(x / s, h) - (1.0 + h * p * (h - 1.0 - 0.5 * (2.0 - h) * m * p));
  double den = h * std::sqrt(2.0 * p) * (1.0 + 0.5 * m * p);
  return normal_cdf(num / den);
}

// Poisson mixture sum_{j>=0} pois(j; l/2) P(N/2+j, x/2), started at the modal
// Poisson index and expanded outward (Benton & Krishnamoorthy style). Also
// accumulates the density when pdf_out is non-null.
double poisson_mixture(const NcChiSq& dist, double x, double term_tol, double* pdf_out) {
  const double a = 0.5 * dist.dof;
  const double y = 0.5 * x;
  const double hl = 0.5 * dist.noncentrality;

  const std::int64_t mode = static_cast<std::int64_t>(hl);
  double w_m = std::exp(log_gamma_term(static_cast<double>(mode), hl));
  double g_m = lower_gamma_regularized(a + static_cast<double>(mode), y);
  // d_j = y^{a+j} e^{-y} / Gamma(a+j+1), the step between consecutive g_j.
  double d_m = std::exp(log_gamma_term(a + static_cast<double>(mode), y));

  double sum = w_m * g_m;
  double pdf = w_m * d_m * (a + static_cast<double>(mode)) / y;

  // Upward pass: g_j decreases toward 0, so once the geometric bound on the
  // remaining Poisson mass times the current g is negligible we are done.
  {
    double w = w_m, g = g_m, d = d_m;
    for (std::int64_t j = mode + 1; j < mode + kMaxSeriesIter; ++j) {
      w *= hl / static_cast<double>(j);
      g -= d;
      if (g < 0.0) g = 0.0;
      d *= y / (a + static_cast<double>(j));
      sum += w * g;
      pdf += w * d * (a + static_cast<double>(j)) / y;
      if (g == 0.0 || w < 1e-290) break;
      if (static_cast<double>(j) > hl) {
        double q = hl / static_cast<double>(j + 1);
        if (w * (q / (1.0 - q)) * g < term_tol * sum + 1e-300) break;
      }
    }
  }
  // Downward pass: g_j grows toward 1, so the remaining contribution is
  // bounded by the unseen Poisson mass alone.
  if (mode > 0) {
    double w = w_m, g = g_m, d = d_m;
    for (std::int64_t j = mode - 1; j >= 0; --j) {
      w *= static_cast<double>(j + 1) / hl;
      d *= (a + static_cast<double>(j) + 1.0) / y;
      g += d;
      if (g > 1.0) g = 1.0;
      sum += w * g;
      pdf += w * d * (a + static_cast<double>(j)) / y;
      if (w < 1e-290) break;
      if (j > 0) {
        double r = static_cast<double>(j) / hl;
        if (w * (r / (1.0 - r)) < term_tol * sum + 1e-300) break;
      }
    }
  }
  if (pdf_out) *pdf_out = 0.5 * pdf;
  return std::clamp(sum, 0.0, 1.0);
}

} // namespace

NcChiSqCdf ncchsq_cdf_ex(const NcChiSq& dist, double x, const NcChiSqOptions& opt) {
  validate(dist);
  if (!std::isfinite(x)) {
    if (std::isnan(x)) throw UnstableRegimeError("ncchsq_cdf: x is NaN");
    return {x > 0 ? 1.0 : 0.0, NcChiSqPath::Central, false};
  }
  if (x < 0.0) throw std::domain_error("ncchsq_cdf: x must be >= 0");

  NcChiSqCdf out;
  if (x == 0.0) {
    out.value = 0.0;
    out.path = dist.noncentrality == 0.0 ? NcChiSqPath::Central : NcChiSqPath::Series;
    return out;
  }
  if (dist.noncentrality == 0.0) {
    out.value = lower_gamma_regularized(0.5 * dist.dof, 0.5 * x);
    out.path = NcChiSqPath::Central;
  } else if (dist.noncentrality + dist.dof > opt.stability_ceiling) {
    out.value = std::clamp(sankaran_cdf(dist.dof, dist.noncentrality, x), 0.0, 1.0);
    out.path = NcChiSqPath::MomentApprox;
  } else {
    out.value = poisson_mixture(dist, x, opt.term_tolerance, nullptr);
    out.path = NcChiSqPath::Series;
  }
  if (out.value == 0.0) out.underflowed_to_zero = true;
  return out;
}

double ncchsq_cdf(const NcChiSq& dist, double x) {
  return ncchsq_cdf_ex(dist, x).value;
}

double ncchsq_pdf(const NcChiSq& dist, double x, const NcChiSqOptions& opt) {
  validate(dist);
  if (!(x > 0.0)) return 0.0;
  if (dist.noncentrality == 0.0) {
    double a = 0.5 * dist.dof, y = 0.5 * x;
    return 0.5 * std::exp((a - 1.0) * std::log(y) - y - std::lgamma(a));
  }
  if (dist.noncentrality + dist.dof > opt.stability_ceiling) {
    // matched-moments density; only consumed by safeguarded Newton steps
    double mean = dist.dof + dist.noncentrality;
    double sd = std::sqrt(2.0 * dist.dof + 4.0 * dist.noncentrality);
    return normal_pdf((x - mean) / sd) / sd;
  }
  double pdf = 0.0;
  poisson_mixture(dist, x, 1e-14, &pdf);
  return pdf;
}

double ncchsq_quantile(const NcChiSq& dist, double p, const NcChiSqOptions& opt) {
  validate(dist);
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("ncchsq_quantile: p must be in (0,1)");

  const double mean = dist.dof + dist.noncentrality;
  const double sd = std::sqrt(2.0 * dist.dof + 4.0 * dist.noncentrality);
  auto cdf = [&](double x) { return ncchsq_cdf_ex(dist, x, opt).value; };
  auto cdf_pdf = [&](double x, double* f) {
    if (dist.noncentrality == 0.0 || dist.noncentrality + dist.dof > opt.stability_ceiling) {
      *f = ncchsq_pdf(dist, x, opt);
      return cdf(x);
    }
    return poisson_mixture(dist, x, opt.term_tolerance, f);
  };

  double lo = std::max(0.0, mean - 8.0 * sd);
  double hi = mean + 8.0 * sd;
  for (int k = 1; lo > 0.0 && cdf(lo) > p; ++k) lo = std::max(0.0, mean - 8.0 * sd * std::pow(2.0, k));
  for (int k = 1; cdf(hi) < p; ++k) {
    hi = mean + 8.0 * sd * std::pow(2.0, k);
    if (k > 60) throw UnstableRegimeError("ncchsq_quantile: bracket expansion failed");
  }
  // Newton from the bracket midpoint, falling back to bisection whenever a
  // step leaves the bracket. Each iteration also tightens the bracket, so the
  // worst case degenerates to plain bisection.
  double x = 0.5 * (lo + hi);
  for (int i = 0; i < 200 && hi - lo > 1e-11 * std::max(1.0, lo); ++i) {
    double f = 0.0;
    double value = cdf_pdf(x, &f);
    if (value < p)
      lo = x;
    else
      hi = x;
    double next = 0.0;
    if (f > 0.0 && std::isfinite(f)) next = x - (value - p) / f;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - x) <= 1e-12 * std::max(1.0, x)) return next;
    x = next;
  }
  return 0.5 * (lo + hi);
}

double chernoff_central_bound(int dof, double z) {
  if (dof < 1) throw std::domain_error("chernoff_central_bound: dof must be >= 1");
  if (!(z > 0.0) || z == 1.0) throw std::domain_error("chernoff_central_bound: need z > 0, z != 1");
  return std::exp(0.5 * dof * (std::log(z) + 1.0 - z));
}

// ----------------------------------------------------------------------------
// Exact binomial inference
// ----------------------------------------------------------------------------

namespace {

void validate(const BinomialEstimate& est) {
  if (est.trials < 1) throw std::domain_error("BinomialEstimate: trials must be >= 1");
  if (est.successes < 0 || est.successes > est.trials)
    throw std::domain_error("BinomialEstimate: successes must be in [0, trials]");
  if (!(est.confidence_level > 0.0 && est.confidence_level < 1.0))
    throw std::domain_error("BinomialEstimate: confidence_level must be in (0,1)");
}

// P(X >= k | n, p) through the incomplete beta identity.
double binom_sf_inclusive(std::int64_t k, std::int64_t n, double p) {
  if (k <= 0) return 1.0;
  if (k > n) return 0.0;
  return regularized_incomplete_beta(p, static_cast<double>(k), static_cast<double>(n - k + 1));
}

double bisect_probability(const std::function<double(double)>& f, double target) {
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (f(mid) < target)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-14) break;
  }
  return 0.5 * (lo + hi);
}

} // namespace

double clopper_pearson_lower(const BinomialEstimate& est) {
  validate(est);
  if (est.successes == 0) return 0.0;
  const double alpha = 1.0 - est.confidence_level;
  // P(X >= k | p) is increasing in p; the bound solves it against alpha.
  auto f = [&](double p) { return binom_sf_inclusive(est.successes, est.trials, p); };
  return bisect_probability(f, alpha);
}

double clopper_pearson_upper(const BinomialEstimate& est) {
  validate(est);
  if (est.successes == est.trials) return 1.0;
  const double alpha = 1.0 - est.confidence_level;
  // P(X <= k | p) = 1 - P(X >= k+1 | p) is decreasing in p.
  auto f = [&](double p) { return binom_sf_inclusive(est.successes + 1, est.trials, p); };
  return bisect_probability(f, 1.0 - alpha);
}

double binomial_two_sided_pvalue(std::int64_t successes, std::int64_t trials, double p0) {
  if (trials < 1 || successes < 0 || successes > trials)
    throw std::domain_error("binomial_two_sided_pvalue: bad counts");
  if (!(p0 >= 0.0 && p0 <= 1.0)) throw std::domain_error("binomial_two_sided_pvalue: bad p0");
  if (p0 == 0.0) return successes == 0 ? 1.0 : 0.0;
  if (p0 == 1.0) return successes == trials ? 1.0 : 0.0;

  const double n = static_cast<double>(trials);
  const double lp = std::log(p0), lq = std::log1p(-p0);
  auto log_pmf = [&](std::int64_t k) {
    double kd = static_cast<double>(k);
    return std::lgamma(n + 1.0) - std::lgamma(kd + 1.0) - std::lgamma(n - kd + 1.0) + kd * lp +
           (n - kd) * lq;
  };
  const double log_obs = log_pmf(successes) + 1e-9; // tolerate rounding ties
  double pval = 0.0;
  for (std::int64_t k = 0; k <= trials; ++k) {
    double lk = log_pmf(k);
    if (lk <= log_obs) pval += std::exp(lk);
  }
  return std::min(1.0, pval);
}

} // namespace idrs
