#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "idrs/certification.hpp"
#include "idrs/datasets.hpp"

namespace idrs {

struct PointOutcome {
  int index = 0;
  int label = 0;
  CertificationResult cert;
};

struct RunSummary {
  std::size_t count = 0;
  double clean_accuracy = 0.0;
  double abstention_rate = 0.0;
  double misclassification_rate = 0.0;
  double classwise_accuracy_std = 0.0;
};

// clean + abstention + misclassification sum to one
RunSummary summarize(const std::vector<PointOutcome>& outcomes, int num_classes);

// fraction of points that are correct and certified at each grid radius;
// nonincreasing by construction
std::vector<std::pair<double, double>> certified_accuracy_curve(
    const std::vector<PointOutcome>& outcomes, const std::vector<double>& radii);

// Certify every dataset point, fanning out over `jobs` threads. Results are
// independent of the thread schedule because sampling streams are keyed by
// point index. field == nullptr runs the constant-sigma baseline.
std::vector<PointOutcome> certify_dataset(const BaseClassifier& f, const SigmaField* field,
                                          double const_sigma, const Dataset& data,
                                          const SmoothingConfig& cfg,
                                          const RadiusSearchConfig& search, int jobs);

// ---------------------------------------------------------------------------
// Toy cone experiment: input-dependent versus constant smoothing
// ---------------------------------------------------------------------------

struct ToyRunConfig {
  ConeDatasetSpec dataset;  // training-set spec; the test set reuses it with
                            // a derived seed and test_per_class points
  int test_per_class = 100;
  double const_sigma = 0.5;
  double sigma_base = 0.4;
  double rate = 0.2;
  int k = 20;
  NormalizationMode norm_mode = NormalizationMode::MinDist;
  double sigma_cap_factor = 5.0; // cap = factor * sigma_base; <= 0 disables
  MlpTrainConfig train;          // augmentation off by default for the cone data
  SmoothingConfig smoothing;
  RadiusSearchConfig search;
  int jobs = 2;
};

struct ToyComparison {
  Dataset train_data;
  Dataset test_data;
  double base_test_accuracy = 0.0; // unsmoothed classifier on clean test data
  double constant_ceiling = 0.0;   // sigma * Phi^-1(alpha^{1/n})
  double mean_field_sigma = 0.0;   // average sigma(x) over the test set
  std::vector<PointOutcome> constant_points;
  std::vector<PointOutcome> idrs_points;
  RunSummary constant_summary;
  RunSummary idrs_summary;
};

ToyComparison run_toy_comparison(const ToyRunConfig& cfg);

// ---------------------------------------------------------------------------
// Ball-indicator counterexample to per-point noise maximization
// ---------------------------------------------------------------------------

struct CounterexampleReport {
  // per-point noise maximization at x0 = (50, 0) against the unit ball
  double naive_sigma = 0.0;
  double naive_radius = 0.0; // claimed certified radius, > 50 by construction
  bool naive_violation_found = false;
  double violation_distance = 0.0; // probe whose exact prediction flips

  // elasticity-constrained certificate at the same point
  double idrs_sigma0 = 0.0;
  double idrs_radius = 0.0;
  bool idrs_sweep_clean = false;

  // degenerate query at the ball center
  int center_class = 0;
  double center_radius = 0.0;
};

// rate: elasticity budget granted to the honest certificate.
CounterexampleReport run_counterexample(double rate = 0.05, int probes = 200);

} // namespace idrs
