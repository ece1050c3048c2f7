#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace idrs {

// Raised when an input would push a probability computation outside the
// numerically trustworthy regime (non-finite parameters, non-convergent
// series). Callers that certify must treat this as "not certified".
class UnstableRegimeError : public std::runtime_error {
 public:
  explicit UnstableRegimeError(const std::string& msg) : std::runtime_error(msg) {}
};

// ---------------------------------------------------------------------------
// Standard normal
// ---------------------------------------------------------------------------

double normal_cdf(double x);
double normal_pdf(double x);

// Inverse of normal_cdf. Accurate to ~1 ulp after a Halley refinement of the
// Acklam rational approximation. Throws std::domain_error for p outside (0,1).
double normal_quantile(double p);

// ---------------------------------------------------------------------------
// Incomplete gamma / beta
// ---------------------------------------------------------------------------

// Regularized lower incomplete gamma P(a,x); series for x < a+1, Lentz
// continued fraction otherwise.
double lower_gamma_regularized(double a, double x);
double upper_gamma_regularized(double a, double x);

// Regularized incomplete beta I_x(a,b) via Lentz continued fraction.
double regularized_incomplete_beta(double x, double a, double b);

// ---------------------------------------------------------------------------
// Noncentral chi-squared
// ---------------------------------------------------------------------------

// Distribution of ||Z + z||^2, Z ~ N(0, I_N), with noncentrality = ||z||^2.
struct NcChiSq {
  int dof = 1;                // N >= 1
  double noncentrality = 0.0; // lambda >= 0, finite
};

enum class NcChiSqPath {
  Central,      // lambda == 0, single incomplete-gamma term
  Series,       // Poisson mixture summed outward from the modal index
  MomentApprox, // cube-root moment-matched normal approximation
};

struct NcChiSqCdf {
  double value = 0.0;
  NcChiSqPath path = NcChiSqPath::Central;
  bool underflowed_to_zero = false; // true value positive but below ~1e-300
};

struct NcChiSqOptions {
  // dof + noncentrality above this switches to the moment approximation.
  double stability_ceiling = 1e8;
  // Relative truncation tolerance for the mixture series.
  double term_tolerance = 1e-12;
};

// CDF with evaluation-path diagnostics. Throws std::domain_error for invalid
// parameters and UnstableRegimeError for non-finite ones.
NcChiSqCdf ncchsq_cdf_ex(const NcChiSq& dist, double x, const NcChiSqOptions& opt = {});

double ncchsq_cdf(const NcChiSq& dist, double x);
double ncchsq_pdf(const NcChiSq& dist, double x, const NcChiSqOptions& opt = {});

// Inverse CDF: bracketing around mean +- k stddev, bisection to 1e-10
// relative width, one Newton polish.
double ncchsq_quantile(const NcChiSq& dist, double p, const NcChiSqOptions& opt = {});

// (z e^{1-z})^{N/2}: upper bound on the central chi-squared CDF at z*N for
// z < 1, and on its complement for z > 1.
double chernoff_central_bound(int dof, double z);

// ---------------------------------------------------------------------------
// Exact binomial inference
// ---------------------------------------------------------------------------

struct BinomialEstimate {
  std::int64_t successes = 0;
  std::int64_t trials = 1;
  double confidence_level = 0.999; // 1 - alpha
};

// One-sided exact (Clopper-Pearson) bounds on the success probability.
// lower: largest p with P(X >= successes | p) <= 1 - confidence_level.
double clopper_pearson_lower(const BinomialEstimate& est);
double clopper_pearson_upper(const BinomialEstimate& est);

// Exact two-sided p-value for H0: p = p0, summing the probability of every
// outcome no more likely than the observed one.
double binomial_two_sided_pvalue(std::int64_t successes, std::int64_t trials, double p0);

} // namespace idrs
