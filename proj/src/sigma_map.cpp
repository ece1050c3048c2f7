#include "idrs/sigma_map.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace idrs {

namespace {

double sq_dist(std::span<const double> a, const double* b, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

} // namespace

SigmaField::SigmaField(std::vector<double> reference_data, int dim, double sigma_base, double rate,
                       int k, double normalization, std::optional<double> sigma_cap,
                       bool exclude_self)
    : data_(std::move(reference_data)),
      dim_(dim),
      count_(dim > 0 ? data_.size() / dim : 0),
      sigma_base_(sigma_base),
      rate_(rate),
      k_(k),
      normalization_(normalization),
      sigma_cap_(sigma_cap),
      exclude_self_(exclude_self) {
  if (dim_ < 1) throw std::domain_error("SigmaField: dim must be >= 1");
  if (data_.empty() || data_.size() % dim_ != 0)
    throw std::domain_error("SigmaField: reference data must be a nonempty multiple of dim");
  if (!(sigma_base_ > 0.0)) throw std::domain_error("SigmaField: sigma_base must be positive");
  if (!(rate_ >= 0.0)) throw std::domain_error("SigmaField: rate must be >= 0");
  if (k_ < 1 || static_cast<std::size_t>(k_) > count_ - (exclude_self_ ? 1 : 0))
    throw std::domain_error("SigmaField: k must be in [1, number of usable reference points]");
  if (sigma_cap_ && !(*sigma_cap_ > 0.0))
    throw std::domain_error("SigmaField: sigma_cap must be positive");
}

std::span<const double> SigmaField::point(std::size_t i) const {
  return {data_.data() + i * dim_, static_cast<std::size_t>(dim_)};
}

double SigmaField::mean_knn_distance(std::span<const double> x) const {
  if (x.size() != static_cast<std::size_t>(dim_))
    throw std::invalid_argument("mean_knn_distance: dimension mismatch");

  // Exact brute force; (distance^2, index) pairs keep tie-breaking deterministic.
  std::vector<std::pair<double, std::size_t>> dists;
  dists.reserve(count_);
  bool self_skipped = false;
  for (std::size_t i = 0; i < count_; ++i) {
    double d2 = sq_dist(x, data_.data() + i * dim_, dim_);
    if (exclude_self_ && !self_skipped && d2 == 0.0) {
      self_skipped = true;
      continue;
    }
    dists.emplace_back(d2, i);
  }
  std::partial_sort(dists.begin(), dists.begin() + k_, dists.end());
  double sum = 0.0;
  for (int i = 0; i < k_; ++i) sum += std::sqrt(dists[i].first);
  return sum / k_;
}

double SigmaField::sigma_at(std::span<const double> x) const {
  double s = sigma_base_;
  if (rate_ > 0.0) s = sigma_base_ * std::exp(rate_ * (mean_knn_distance(x) - normalization_));
  if (sigma_cap_) s = std::min(s, *sigma_cap_);
  return s;
}

SemiElasticityReport verify_semi_elasticity(
    const SigmaField& field,
    const std::vector<std::pair<std::vector<double>, std::vector<double>>>& pairs,
    double tolerance) {
  if (pairs.empty()) throw std::domain_error("verify_semi_elasticity: need at least one pair");
  SemiElasticityReport report;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& [a, b] = pairs[i];
    double dist = std::sqrt(sq_dist(a, b.data(), field.dim()));
    if (dist == 0.0) continue;
    double num = std::fabs(std::log(field.sigma_at(a)) - std::log(field.sigma_at(b)));
    double observed = num / dist;
    report.max_observed_rate = std::max(report.max_observed_rate, observed);
    if (observed > field.rate() + tolerance) report.violations.push_back(i);
  }
  return report;
}

double calibrate_normalization(const std::vector<double>& reference_data, int dim, int k,
                               NormalizationMode mode) {
  if (dim < 1 || reference_data.empty() || reference_data.size() % dim != 0)
    throw std::domain_error("calibrate_normalization: bad reference data");
  std::size_t count = reference_data.size() / dim;
  if (k < 1 || static_cast<std::size_t>(k) >= count)
    throw std::domain_error("calibrate_normalization: need k < number of reference points");

  double best = std::numeric_limits<double>::infinity();
  double sum = 0.0;
  std::vector<double> d2(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::span<const double> xi{reference_data.data() + i * dim, static_cast<std::size_t>(dim)};
    std::vector<std::pair<double, std::size_t>> dists;
    dists.reserve(count - 1);
    for (std::size_t j = 0; j < count; ++j) {
      if (j == i) continue; // leave-self-out
      dists.emplace_back(sq_dist(xi, reference_data.data() + j * dim, dim), j);
    }
    std::partial_sort(dists.begin(), dists.begin() + k, dists.end());
    double mean = 0.0;
    for (int t = 0; t < k; ++t) mean += std::sqrt(dists[t].first);
    mean /= k;
    best = std::min(best, mean);
    sum += mean;
  }
  return mode == NormalizationMode::MinDist ? best : sum / count;
}

} // namespace idrs
