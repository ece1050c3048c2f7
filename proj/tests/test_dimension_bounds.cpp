#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "idrs/dimension_bounds.hpp"
#include "idrs/special_fns.hpp"
#include "idrs/worst_case.hpp"

using namespace idrs;

TEST_CASE("threshold table golden values") {
  // N rows: 784 (28x28x1), 3072 (32x32x3), 196608 (3x256x256)
  const double table[3][4] = {
      {0.946, 0.924, 0.908, 0.892},
      {0.973, 0.961, 0.953, 0.945},
      {0.997, 0.995, 0.994, 0.993},
  };
  const int dims[3] = {784, 3072, 196608};
  const double pas[4] = {0.9, 0.99, 0.999, 0.99993};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(theoretical_threshold({dims[i], pas[j]}) == doctest::Approx(table[i][j]).epsilon(0).scale(0).epsilon(0.0011));
}

TEST_CASE("hopelessness conditions") {
  CHECK(is_hopeless_greater(0.90, {784, 0.9}));
  CHECK_FALSE(is_hopeless_greater(0.999, {3072, 0.99}));
  CHECK_FALSE(is_hopeless_greater(1.0 - 1e-9, {50, 0.9}));

  CHECK(is_hopeless_less(1.2, {3072, 0.99}));
  CHECK_FALSE(is_hopeless_less(1.0 + 1e-9, {100000, 0.999}));
  CHECK_THROWS_AS(is_hopeless_less(1.2, {1, 0.9}), std::domain_error);
  CHECK_THROWS_AS(is_hopeless_greater(1.2, {10, 0.9}), std::domain_error);
}

TEST_CASE("part-2 thresholds near reciprocals of part-1 for large N") {
  for (double pA : {0.9, 0.99, 0.999}) {
    double tg = theoretical_threshold({3072, pA});
    double tl = theoretical_threshold_less({3072, pA});
    CHECK(std::fabs(tl - 1.0 / tg) < 0.005);
  }
}

TEST_CASE("hopeless exactly below the theoretical threshold") {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 40; ++rep) {
    ThresholdQuery q{2 + static_cast<int>(u(rng) * 5000), 0.51 + 0.489 * u(rng)};
    double t = theoretical_threshold(q);
    CHECK(is_hopeless_greater(std::max(1e-6, t - 1e-5), q));
    CHECK_FALSE(is_hopeless_greater(std::min(1.0 - 1e-9, t + 1e-5), q));
  }
}

TEST_CASE("closed-form bound is weaker than the exact threshold") {
  // undefined in low dimension with extreme pA
  CHECK_FALSE(closed_form_threshold({4, 0.999}).has_value());
  // N -> infinity limit approaches 1
  auto big = closed_form_threshold({1000000000, 0.9});
  REQUIRE(big.has_value());
  CHECK(*big > 0.999);

  auto c = closed_form_threshold({3072, 0.999});
  REQUIRE(c.has_value());
  CHECK(*c <= theoretical_threshold({3072, 0.999}) + 1e-12);

  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 40; ++rep) {
    ThresholdQuery q{50 + static_cast<int>(u(rng) * 10000), 0.51 + 0.45 * u(rng)};
    auto cf = closed_form_threshold(q);
    if (cf) CHECK(*cf <= theoretical_threshold(q) + 1e-12);
  }
}

TEST_CASE("practical threshold sits at the feasibility frontier") {
  // frozen reference values (independently computed)
  CHECK(practical_threshold({3072, 0.9}) == doctest::Approx(0.983694).epsilon(2e-4));
  CHECK(practical_threshold({3072, 0.999}) == doctest::Approx(0.960835).epsilon(2e-4));

  // the shrinking-noise condition never declares a certifiable ratio hopeless
  for (double pA : {0.9, 0.99, 0.999}) {
    for (int n : {10, 100, 1000, 3072}) {
      ThresholdQuery q{n, pA};
      double prac = practical_threshold(q);
      double theo = theoretical_threshold(q);
      CHECK(prac >= theo - 1e-9);
      // crossing property of the root
      NcChiSq central{n, 0.0};
      double quant = ncchsq_quantile(central, 1.0 - pA);
      double above = ncchsq_cdf(central, quant / std::pow(prac * (1.0 + 1e-4), 2.0));
      CHECK(above < 0.5);
      double at = ncchsq_cdf(central, quant / (prac * prac));
      CHECK(at == doctest::Approx(0.5).epsilon(0).scale(0).epsilon(1e-5));
    }
  }

  // tightness improves with dimension
  double gap10 = practical_threshold({10, 0.9}) - theoretical_threshold({10, 0.9});
  double gap1000 = practical_threshold({1000, 0.9}) - theoretical_threshold({1000, 0.9});
  CHECK(gap1000 < gap10);

  // the practical threshold agrees with a direct xi evaluation at a = 0
  double t = practical_threshold({128, 0.95});
  auto pair = make_pair_complement(1.0, t, 0.0, 128, 0.95);
  CHECK(xi_greater(pair) == doctest::Approx(0.5).epsilon(0).scale(0).epsilon(1e-5));
}

TEST_CASE("admissible ratio variation scales as 1/sqrt(N)") {
  auto v = max_ratio_variation_scaling({100, 400}, 0.01, 2.0);
  REQUIRE(v.size() == 2);
  CHECK(v[1] == doctest::Approx(v[0] / 2.0).epsilon(1e-12));

  auto single = max_ratio_variation_scaling({3072}, 0.5, 1.0);
  REQUIRE(single.size() == 1);
  CHECK(single[0] > 0.0);

  auto nearly_one = max_ratio_variation_scaling({100}, 1.0 - 1e-12, 1.0);
  CHECK(nearly_one[0] < 1e-5);

  CHECK_THROWS_AS(max_ratio_variation_scaling({}, 0.5, 1.0), std::domain_error);
}
