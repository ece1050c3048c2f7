#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "idrs/smoothing.hpp"
#include "idrs/special_fns.hpp"

namespace idrs {

// Ratio thresholds that cap how close the evaluated adversary noise may come
// to sigma0. Evaluating a more extreme ratio than the envelope requires is
// sound (the certificate only weakens) and keeps the noncentrality finite.
struct ClampFunctions {
  double base = 0.9993;  // dimension-dependent intercept
  double slope = 0.001;  // per decade of pB

  // shrinking-side ratio threshold; always in (0.2, 1)
  double sigma_t(double pb) const;
  // growing-side threshold, 1/sigma_t
  double sigma_T(double pb) const;
};

// Intercepts pinned at 784 -> 0.9988 and 3072 -> 0.9993, log-linear in N
// elsewhere. Interpolated dimensions should pass clamp_stability_scan.
ClampFunctions default_clamps(int dof);

struct RadiusSearchConfig {
  int num_steps = 2000;
  double max_radius_factor = 1.0; // search cap as a multiple of the constant-sigma radius
  bool use_clamps = true;
  bool auto_clamps = true; // derive the thresholds from the problem dimension
  ClampFunctions clamps;   // only consulted when use_clamps && !auto_clamps
  NcChiSqOptions ncchsq;
};

struct RadiusDiagnostics {
  bool clamp_hit = false;        // a grid point used the threshold instead of the envelope
  bool approx_path_used = false; // some probability came from the moment approximation
  int unstable_points = 0;       // grid points conservatively treated as uncertified
  int evaluations = 0;
  double grid_step = 0.0;
  std::vector<std::string> notes;
};

struct IdrsRadius {
  double radius = 0.0;
  RadiusDiagnostics diag;
};

// Largest R on the grid such that both envelope extremes at every distance up
// to R keep the worst-case runner-up probability below 1/2. rate == 0
// reduces exactly to the constant-sigma radius.
IdrsRadius idrs_certified_radius(double sigma0, double rate, int dof, double pa_lower,
                                 double pb_upper, const RadiusSearchConfig& search);

// Largest index i in [0, grid_size) with certifiable(j) true for all j <= i,
// or -1. Assumes the predicate is prefix-true; probes every squared index and
// bisects the last gap, so O(sqrt(G) + log G) evaluations.
std::int64_t stride_search(const std::function<bool(std::int64_t)>& certifiable,
                           std::int64_t grid_size, int* evaluations = nullptr);

// Sanity scan for a clamp choice at a given dimension: the worst-case
// probability curves at the clamped ratio must be finite and nondecreasing in
// distance. Returns human-readable complaints; empty means usable.
std::vector<std::string> clamp_stability_scan(int dof, const std::vector<double>& pa_values,
                                              const ClampFunctions& clamps);

enum class CertMethod { CohenConstant, Idrs, Renyi };

struct CertificationResult {
  int predicted = kAbstain;
  double pa_lower = 0.0;
  double pb_upper = 1.0;
  double sigma0 = 0.0;
  double radius = 0.0;
  CertMethod method = CertMethod::Idrs;
  RadiusDiagnostics diag;
};

// Full pipeline: sigma0 from the field, Monte-Carlo class selection and
// estimation, then the certified radius for the field's elasticity rate.
CertificationResult certify_point(const BaseClassifier& f, const SigmaField& field,
                                  std::span<const double> x0, const SmoothingConfig& cfg,
                                  const RadiusSearchConfig& search, std::uint64_t point_id = 0);

// Constant-sigma baseline sharing the same sampling streams.
CertificationResult certify_point_constant(const BaseClassifier& f, double sigma,
                                           std::span<const double> x0, const SmoothingConfig& cfg,
                                           std::uint64_t point_id = 0);

} // namespace idrs
