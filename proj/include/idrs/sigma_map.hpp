#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace idrs {

// Input-dependent noise level sigma(x) = sigma_base * exp(rate * (d_k(x) - m)),
// where d_k is the mean distance to the k nearest reference points and m a
// normalization constant. log sigma is rate-Lipschitz by construction, and
// clamping by a constant cap preserves that.
class SigmaField {
 public:
  SigmaField(std::vector<double> reference_data, int dim, double sigma_base, double rate, int k,
             double normalization, std::optional<double> sigma_cap = std::nullopt,
             bool exclude_self = false);

  int dim() const { return dim_; }
  std::size_t size() const { return count_; }
  double sigma_base() const { return sigma_base_; }
  double rate() const { return rate_; }
  int k() const { return k_; }
  double normalization() const { return normalization_; }
  std::optional<double> sigma_cap() const { return sigma_cap_; }
  std::span<const double> point(std::size_t i) const;

  // Mean of the k smallest distances from x to the reference points, ties
  // broken by reference index. With exclude_self, one exact coincidence is
  // dropped from the candidate set.
  double mean_knn_distance(std::span<const double> x) const;

  double sigma_at(std::span<const double> x) const;

 private:
  std::vector<double> data_;
  int dim_;
  std::size_t count_;
  double sigma_base_;
  double rate_;
  int k_;
  double normalization_;
  std::optional<double> sigma_cap_;
  bool exclude_self_;
};

struct SemiElasticityReport {
  double max_observed_rate = 0.0;
  std::vector<std::size_t> violations; // indices of offending pairs
};

// Empirical check of |log sigma(x0) - log sigma(x1)| <= rate * ||x0 - x1||
// over the supplied pairs (flattened as x0 then x1, each of field.dim()).
SemiElasticityReport verify_semi_elasticity(const SigmaField& field,
                                            const std::vector<std::pair<std::vector<double>,
                                                                        std::vector<double>>>& pairs,
                                            double tolerance = 1e-12);

enum class NormalizationMode { MinDist, MeanDist };

// Leave-self-out mean-kNN distances over the reference set, reduced by min or
// mean. Used so that sigma(x) bottoms out at (or averages to) sigma_base.
double calibrate_normalization(const std::vector<double>& reference_data, int dim, int k,
                               NormalizationMode mode);

} // namespace idrs
