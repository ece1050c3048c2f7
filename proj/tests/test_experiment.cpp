#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "idrs/experiment.hpp"

using namespace idrs;

namespace {

PointOutcome outcome(int label, int predicted, double radius) {
  PointOutcome o;
  o.label = label;
  o.cert.predicted = predicted;
  o.cert.radius = radius;
  return o;
}

} // namespace

TEST_CASE("summary rates decompose to one") {
  std::vector<PointOutcome> xs{
      outcome(0, 0, 1.0),        outcome(0, 1, 0.2),  outcome(1, 1, 0.5),
      outcome(1, kAbstain, 0.0), outcome(1, 0, 0.05),
  };
  auto s = summarize(xs, 2);
  CHECK(s.count == 5);
  CHECK(s.clean_accuracy + s.abstention_rate + s.misclassification_rate ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.clean_accuracy == doctest::Approx(0.4));
  CHECK(s.abstention_rate == doctest::Approx(0.2));
  CHECK(s.misclassification_rate == doctest::Approx(0.4));
  // class accuracies 1/2 and 1/3
  double mean = (0.5 + 1.0 / 3.0) / 2.0;
  double var = (std::pow(0.5 - mean, 2) + std::pow(1.0 / 3.0 - mean, 2)) / 2.0;
  CHECK(s.classwise_accuracy_std == doctest::Approx(std::sqrt(var)).epsilon(1e-12));
}

TEST_CASE("certified accuracy curves are nonincreasing step functions") {
  std::vector<PointOutcome> xs{outcome(0, 0, 0.9), outcome(1, 1, 0.4), outcome(1, 0, 2.0),
                               outcome(0, kAbstain, 0.0)};
  std::vector<double> grid{0.0, 0.25, 0.5, 1.0, 3.0};
  auto curve = certified_accuracy_curve(xs, grid);
  REQUIRE(curve.size() == grid.size());
  CHECK(curve[0].second == doctest::Approx(0.5)); // both correct points
  CHECK(curve[1].second == doctest::Approx(0.5));
  CHECK(curve[2].second == doctest::Approx(0.25)); // only the 0.9-radius point
  CHECK(curve[3].second == doctest::Approx(0.0));
  for (std::size_t i = 1; i < curve.size(); ++i) CHECK(curve[i].second <= curve[i - 1].second);
}

TEST_CASE("dataset certification is schedule independent") {
  BallIndicator ball({0.0, 0.0}, 2.0);
  Dataset data;
  data.dim = 2;
  for (int i = 0; i < 16; ++i) {
    data.points.push_back(0.2 * i - 1.5);
    data.points.push_back(0.1 * i - 0.8);
    data.labels.push_back(i % 2);
  }
  SmoothingConfig cfg;
  cfg.n0 = 50;
  cfg.n = 500;
  cfg.seed = 5;
  RadiusSearchConfig search;
  search.num_steps = 100;

  auto serial = certify_dataset(ball, nullptr, 0.5, data, cfg, search, 1);
  auto parallel = certify_dataset(ball, nullptr, 0.5, data, cfg, search, 4);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].cert.predicted == parallel[i].cert.predicted);
    CHECK(serial[i].cert.radius == parallel[i].cert.radius);
    CHECK(serial[i].cert.pa_lower == parallel[i].cert.pa_lower);
  }
}

TEST_CASE("toy comparison produces a usable bundle") {
  ToyRunConfig cfg;
  cfg.dataset.dim = 2;
  cfg.dataset.n_per_class = 200;
  cfg.dataset.radial_scale = 3.0;
  cfg.dataset.seed = 11;
  cfg.test_per_class = 50;
  cfg.smoothing.n0 = 100;
  cfg.smoothing.n = 1000;
  cfg.smoothing.seed = 3;
  cfg.search.num_steps = 200;
  cfg.train.seed = 4;
  auto run = run_toy_comparison(cfg);

  CHECK(run.base_test_accuracy >= 0.9); // the training contract for the toy net
  CHECK(run.train_data.size() == 400);
  CHECK(run.test_data.size() == 100);
  CHECK(run.mean_field_sigma >= cfg.sigma_base - 1e-9);
  CHECK(run.constant_ceiling ==
        doctest::Approx(0.5 * normal_quantile(std::pow(0.001, 1.0 / 1000.0))));
  auto sums = {run.constant_summary, run.idrs_summary};
  for (const auto& s : sums) {
    CHECK(s.count == 100);
    CHECK(s.clean_accuracy + s.abstention_rate + s.misclassification_rate ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
  // no constant-pipeline radius can exceed the finite-sample ceiling
  for (const auto& o : run.constant_points) CHECK(o.cert.radius <= run.constant_ceiling + 1e-9);
}

TEST_CASE("per-point noise maximization counterexample") {
  auto rep = run_counterexample(0.05, 120);
  CHECK(rep.naive_radius > 50.0);
  CHECK(rep.naive_violation_found);
  CHECK(rep.violation_distance <= rep.naive_radius);
  CHECK(rep.idrs_radius < 50.0);
  CHECK(rep.idrs_sweep_clean);
  CHECK(rep.center_class == 1);
  CHECK(rep.center_radius > 0.0);
  CHECK(rep.center_radius < 2.0);
}
