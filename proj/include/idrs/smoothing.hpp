#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "idrs/sigma_map.hpp"

namespace idrs {

// Deterministic, total classifier over R^N. Implementations must be safely
// shareable read-only across threads.
class BaseClassifier {
 public:
  virtual ~BaseClassifier() = default;
  virtual int classify(std::span<const double> x) const = 0;
  virtual int num_classes() const = 0;
  virtual int dim() const = 0;
};

// class 1 iff normal . x >= offset
class LinearHalfSpace final : public BaseClassifier {
 public:
  LinearHalfSpace(std::vector<double> normal, double offset);
  int classify(std::span<const double> x) const override;
  int num_classes() const override { return 2; }
  int dim() const override { return static_cast<int>(normal_.size()); }

 private:
  std::vector<double> normal_;
  double offset_;
};

// class 1 iff ||x - center|| <= radius
class BallIndicator final : public BaseClassifier {
 public:
  BallIndicator(std::vector<double> center, double radius);
  int classify(std::span<const double> x) const override;
  int num_classes() const override { return 2; }
  int dim() const override { return static_cast<int>(center_.size()); }
  std::span<const double> center() const { return center_; }
  double radius() const { return radius_; }

 private:
  std::vector<double> center_;
  double radius_;
};

// majority label among the k nearest labeled points; ties prefer the smaller
// class index
class KnnVote final : public BaseClassifier {
 public:
  KnnVote(std::vector<double> points, std::vector<int> labels, int dim, int k);
  int classify(std::span<const double> x) const override;
  int num_classes() const override { return num_classes_; }
  int dim() const override { return dim_; }

 private:
  std::vector<double> points_;
  std::vector<int> labels_;
  int dim_;
  int k_;
  int num_classes_;
};

// small fully connected ReLU network, argmax readout
class TinyMlp final : public BaseClassifier {
 public:
  // layer_sizes = {in, h1, ..., out}; weights/biases row-major per layer
  TinyMlp(std::vector<int> layer_sizes, std::vector<std::vector<double>> weights,
          std::vector<std::vector<double>> biases);
  int classify(std::span<const double> x) const override;
  int num_classes() const override { return layer_sizes_.back(); }
  int dim() const override { return layer_sizes_.front(); }
  void logits(std::span<const double> x, std::vector<double>& out) const;

  const std::vector<int>& layer_sizes() const { return layer_sizes_; }
  const std::vector<std::vector<double>>& weights() const { return weights_; }
  const std::vector<std::vector<double>>& biases() const { return biases_; }

 private:
  std::vector<int> layer_sizes_;
  std::vector<std::vector<double>> weights_;
  std::vector<std::vector<double>> biases_;
};

struct MlpTrainConfig {
  int hidden_width = 20;
  int hidden_layers = 2;
  int epochs = 200;
  double learning_rate = 0.05;
  int batch_size = 32;
  std::uint64_t seed = 1;
  // Gaussian data augmentation: per-example std is constant, or drawn from a
  // field when one is supplied (train-time rate lives in that field).
  double augment_sigma = 0.0;
  const SigmaField* augment_field = nullptr;
};

TinyMlp train_tiny_mlp(const std::vector<double>& xs, const std::vector<int>& ys, int dim,
                       int num_classes, const MlpTrainConfig& cfg);

// ---------------------------------------------------------------------------
// Monte-Carlo smoothing
// ---------------------------------------------------------------------------

inline constexpr int kAbstain = -1;

enum class PbMode { Complement, Estimated };

struct SmoothingConfig {
  std::int64_t n0 = 100;    // selection draws
  std::int64_t n = 100000;  // estimation draws
  double alpha = 0.001;     // confidence level
  std::int64_t mc_batch = 10000;
  std::uint64_t seed = 0;
  PbMode pb_mode = PbMode::Complement;
};

// Class counts from `count` noisy evaluations of f around x0. `phase`
// separates the independent sampling stages of one certification.
std::vector<std::int64_t> sample_class_counts(const BaseClassifier& f, double sigma0,
                                              std::span<const double> x0, std::int64_t count,
                                              const SmoothingConfig& cfg, std::uint64_t point_id,
                                              std::uint64_t phase);

// Top class if the exact two-sided binomial test on the top-two counts
// rejects p = 0.5 at level alpha, else kAbstain.
int predict(const BaseClassifier& f, double sigma0, std::span<const double> x0,
            const SmoothingConfig& cfg, std::uint64_t point_id = 0);

struct PaEstimate {
  int top_class = kAbstain;
  double pa_lower = 0.0;
  double pb_upper = 1.0;
  std::vector<std::int64_t> counts0;
  std::vector<std::int64_t> counts;
};

// Selection counts pick the candidate class, estimation counts give the
// Clopper-Pearson bound. In Estimated mode the confidence budget is split
// alpha/2 for pA and alpha/2 for the runner-up pB bound.
PaEstimate estimate_pa(const BaseClassifier& f, double sigma0, std::span<const double> x0,
                       const SmoothingConfig& cfg, std::uint64_t point_id = 0);

// max(0, sigma/2 (Phi^-1(pa) - Phi^-1(pb)))
double cohen_radius(double pa_lower, double pb_upper, double sigma);

// Certified radius of a linear boundary at the given distances when pA is
// known exactly but must pass through the finite-sample lower bound: the
// waterfall ceiling sigma * Phi^-1(alpha^{1/n}) emerges at large distance.
std::vector<std::pair<double, double>> linear_truncation_curve(double sigma,
                                                               const std::vector<double>& distances,
                                                               const SmoothingConfig& cfg);

} // namespace idrs
