#include "idrs/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "idrs/rng.hpp"
#include "idrs/special_fns.hpp"

namespace idrs {

// ---------------------------------------------------------------------------
// Base classifiers
// ---------------------------------------------------------------------------

LinearHalfSpace::LinearHalfSpace(std::vector<double> normal, double offset)
    : normal_(std::move(normal)), offset_(offset) {
  if (normal_.empty()) throw std::domain_error("LinearHalfSpace: empty normal");
}

int LinearHalfSpace::classify(std::span<const double> x) const {
  if (x.size() != normal_.size()) throw std::invalid_argument("LinearHalfSpace: dimension mismatch");
  double dot = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) dot += normal_[i] * x[i];
  return dot >= offset_ ? 1 : 0;
}

BallIndicator::BallIndicator(std::vector<double> center, double radius)
    : center_(std::move(center)), radius_(radius) {
  if (center_.empty() || !(radius_ > 0.0)) throw std::domain_error("BallIndicator: bad parameters");
}

int BallIndicator::classify(std::span<const double> x) const {
  if (x.size() != center_.size()) throw std::invalid_argument("BallIndicator: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double d = x[i] - center_[i];
    s += d * d;
  }
  return s <= radius_ * radius_ ? 1 : 0;
}

KnnVote::KnnVote(std::vector<double> points, std::vector<int> labels, int dim, int k)
    : points_(std::move(points)), labels_(std::move(labels)), dim_(dim), k_(k) {
  if (dim_ < 1 || points_.size() != labels_.size() * static_cast<std::size_t>(dim_))
    throw std::domain_error("KnnVote: inconsistent points/labels");
  if (k_ < 1 || static_cast<std::size_t>(k_) > labels_.size())
    throw std::domain_error("KnnVote: bad k");
  num_classes_ = labels_.empty() ? 0 : *std::max_element(labels_.begin(), labels_.end()) + 1;
  for (int l : labels_)
    if (l < 0) throw std::domain_error("KnnVote: negative label");
}

int KnnVote::classify(std::span<const double> x) const {
  if (x.size() != static_cast<std::size_t>(dim_)) throw std::invalid_argument("KnnVote: dimension mismatch");
  std::vector<std::pair<double, std::size_t>> d(labels_.size());
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    double s = 0.0;
    const double* p = points_.data() + i * dim_;
    for (int j = 0; j < dim_; ++j) s += (x[j] - p[j]) * (x[j] - p[j]);
    d[i] = {s, i};
  }
  std::partial_sort(d.begin(), d.begin() + k_, d.end());
  std::vector<int> votes(num_classes_, 0);
  for (int i = 0; i < k_; ++i) ++votes[labels_[d[i].second]];
  return static_cast<int>(std::max_element(votes.begin(), votes.end()) - votes.begin());
}

TinyMlp::TinyMlp(std::vector<int> layer_sizes, std::vector<std::vector<double>> weights,
                 std::vector<std::vector<double>> biases)
    : layer_sizes_(std::move(layer_sizes)), weights_(std::move(weights)), biases_(std::move(biases)) {
  if (layer_sizes_.size() < 2 || weights_.size() != layer_sizes_.size() - 1 ||
      biases_.size() != weights_.size())
    throw std::domain_error("TinyMlp: inconsistent shape");
}

void TinyMlp::logits(std::span<const double> x, std::vector<double>& out) const {
  std::vector<double> cur(x.begin(), x.end());
  std::vector<double> next;
  for (std::size_t layer = 0; layer < weights_.size(); ++layer) {
    int in = layer_sizes_[layer], outn = layer_sizes_[layer + 1];
    next.assign(outn, 0.0);
    const auto& w = weights_[layer];
    const auto& b = biases_[layer];
    for (int o = 0; o < outn; ++o) {
      double acc = b[o];
      const double* row = w.data() + static_cast<std::size_t>(o) * in;
      for (int i = 0; i < in; ++i) acc += row[i] * cur[i];
      next[o] = acc;
    }
    if (layer + 1 < weights_.size())
      for (auto& v : next) v = std::max(0.0, v);
    cur.swap(next);
  }
  out = std::move(cur);
}

int TinyMlp::classify(std::span<const double> x) const {
  if (x.size() != static_cast<std::size_t>(dim())) throw std::invalid_argument("TinyMlp: dimension mismatch");
  std::vector<double> z;
  logits(x, z);
  return static_cast<int>(std::max_element(z.begin(), z.end()) - z.begin());
}

TinyMlp train_tiny_mlp(const std::vector<double>& xs, const std::vector<int>& ys, int dim,
                       int num_classes, const MlpTrainConfig& cfg) {
  if (dim < 1 || num_classes < 2 || xs.size() != ys.size() * static_cast<std::size_t>(dim))
    throw std::domain_error("train_tiny_mlp: inconsistent data");
  const std::size_t count = ys.size();

  std::vector<int> sizes{dim};
  for (int i = 0; i < cfg.hidden_layers; ++i) sizes.push_back(cfg.hidden_width);
  sizes.push_back(num_classes);

  GaussianStream init(derive_stream(cfg.seed, 0xA11));
  std::vector<std::vector<double>> w(sizes.size() - 1), b(sizes.size() - 1);
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    w[l].resize(static_cast<std::size_t>(sizes[l + 1]) * sizes[l]);
    b[l].assign(sizes[l + 1], 0.0);
    double scale = std::sqrt(2.0 / sizes[l]);
    for (auto& v : w[l]) v = scale * init.next_gaussian();
  }

  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), 0);

  std::vector<std::vector<double>> acts(sizes.size());
  std::vector<std::vector<double>> grads(sizes.size());
  std::vector<double> noisy(dim);

  GaussianStream shuffle_rng(derive_stream(cfg.seed, 0x5F1E));
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = count; i > 1; --i)
      std::swap(order[i - 1], order[shuffle_rng.next_u64() % i]);
    GaussianStream noise(derive_stream(cfg.seed, 0xA06, static_cast<std::uint64_t>(epoch)));

    for (std::size_t start = 0; start < count; start += cfg.batch_size) {
      std::size_t stop = std::min(count, start + cfg.batch_size);
      // accumulate gradients over the batch
      std::vector<std::vector<double>> gw(w.size()), gb(b.size());
      for (std::size_t l = 0; l < w.size(); ++l) {
        gw[l].assign(w[l].size(), 0.0);
        gb[l].assign(b[l].size(), 0.0);
      }
      for (std::size_t bi = start; bi < stop; ++bi) {
        std::size_t idx = order[bi];
        const double* xp = xs.data() + idx * dim;
        double aug = cfg.augment_sigma;
        if (cfg.augment_field) {
          std::span<const double> xv{xp, static_cast<std::size_t>(dim)};
          aug = cfg.augment_field->sigma_at(xv);
        }
        for (int j = 0; j < dim; ++j)
          noisy[j] = xp[j] + (aug > 0.0 ? aug * noise.next_gaussian() : 0.0);

        // forward
        acts[0].assign(noisy.begin(), noisy.end());
        for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
          acts[l + 1].assign(sizes[l + 1], 0.0);
          for (int o = 0; o < sizes[l + 1]; ++o) {
            double acc = b[l][o];
            const double* row = w[l].data() + static_cast<std::size_t>(o) * sizes[l];
            for (int in = 0; in < sizes[l]; ++in) acc += row[in] * acts[l][in];
            acts[l + 1][o] = (l + 2 < sizes.size()) ? std::max(0.0, acc) : acc;
          }
        }
        // softmax cross-entropy gradient at the output
        auto& out = acts.back();
        double mx = *std::max_element(out.begin(), out.end());
        double z = 0.0;
        for (double v : out) z += std::exp(v - mx);
        grads.back().assign(num_classes, 0.0);
        for (int c = 0; c < num_classes; ++c)
          grads.back()[c] = std::exp(out[c] - mx) / z - (c == ys[idx] ? 1.0 : 0.0);
        // backward
        for (std::size_t l = sizes.size() - 1; l-- > 0;) {
          auto& gout = grads[l + 1];
          for (int o = 0; o < sizes[l + 1]; ++o) {
            gb[l][o] += gout[o];
            double* row = gw[l].data() + static_cast<std::size_t>(o) * sizes[l];
            for (int in = 0; in < sizes[l]; ++in) row[in] += gout[o] * acts[l][in];
          }
          if (l == 0) break;
          grads[l].assign(sizes[l], 0.0);
          for (int in = 0; in < sizes[l]; ++in) {
            if (acts[l][in] <= 0.0) continue; // ReLU gate
            double acc = 0.0;
            for (int o = 0; o < sizes[l + 1]; ++o)
              acc += w[l][static_cast<std::size_t>(o) * sizes[l] + in] * gout[o];
            grads[l][in] = acc;
          }
        }
      }
      double step = cfg.learning_rate / static_cast<double>(stop - start);
      for (std::size_t l = 0; l < w.size(); ++l) {
        for (std::size_t i = 0; i < w[l].size(); ++i) w[l][i] -= step * gw[l][i];
        for (std::size_t i = 0; i < b[l].size(); ++i) b[l][i] -= step * gb[l][i];
      }
    }
  }
  return TinyMlp(sizes, std::move(w), std::move(b));
}

// ---------------------------------------------------------------------------
// Monte-Carlo smoothing
// ---------------------------------------------------------------------------

namespace {

void validate(const SmoothingConfig& cfg) {
  if (cfg.n0 < 1 || cfg.n < 1 || cfg.mc_batch < 1) throw std::domain_error("SmoothingConfig: bad counts");
  if (!(cfg.alpha > 0.0 && cfg.alpha < 0.5)) throw std::domain_error("SmoothingConfig: alpha in (0, 0.5)");
}

int argmax_smallest_index(const std::vector<std::int64_t>& v) {
  return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}

} // namespace

std::vector<std::int64_t> sample_class_counts(const BaseClassifier& f, double sigma0,
                                              std::span<const double> x0, std::int64_t count,
                                              const SmoothingConfig& cfg, std::uint64_t point_id,
                                              std::uint64_t phase) {
  validate(cfg);
  if (!(sigma0 > 0.0)) throw std::domain_error("sample_class_counts: sigma0 must be positive");
  if (x0.size() != static_cast<std::size_t>(f.dim()))
    throw std::invalid_argument("sample_class_counts: dimension mismatch");

  std::vector<std::int64_t> counts(f.num_classes(), 0);
  std::vector<double> noisy(x0.size());
  // Draws are processed in mc_batch chunks; per-sample streams make the
  // counts independent of the chunking.
  for (std::int64_t start = 0; start < count; start += cfg.mc_batch) {
    std::int64_t stop = std::min(count, start + cfg.mc_batch);
    for (std::int64_t i = start; i < stop; ++i) {
      GaussianStream stream(derive_stream(cfg.seed, point_id, phase, static_cast<std::uint64_t>(i)));
      for (std::size_t j = 0; j < x0.size(); ++j) noisy[j] = x0[j] + sigma0 * stream.next_gaussian();
      int c = f.classify(noisy);
      if (c < 0 || c >= f.num_classes()) throw std::runtime_error("classifier returned a bad label");
      ++counts[c];
    }
  }
  return counts;
}

int predict(const BaseClassifier& f, double sigma0, std::span<const double> x0,
            const SmoothingConfig& cfg, std::uint64_t point_id) {
  auto counts = sample_class_counts(f, sigma0, x0, cfg.n, cfg, point_id, /*phase=*/2);
  int top = argmax_smallest_index(counts);
  std::int64_t na = counts[top];
  counts[top] = -1;
  int second = argmax_smallest_index(counts);
  std::int64_t nb = counts[second] < 0 ? 0 : counts[second];
  counts[top] = na;
  if (na + nb == 0) return kAbstain;
  double pval = binomial_two_sided_pvalue(na, na + nb, 0.5);
  return pval <= cfg.alpha ? top : kAbstain;
}

PaEstimate estimate_pa(const BaseClassifier& f, double sigma0, std::span<const double> x0,
                       const SmoothingConfig& cfg, std::uint64_t point_id) {
  PaEstimate est;
  est.counts0 = sample_class_counts(f, sigma0, x0, cfg.n0, cfg, point_id, /*phase=*/0);
  est.top_class = argmax_smallest_index(est.counts0);
  est.counts = sample_class_counts(f, sigma0, x0, cfg.n, cfg, point_id, /*phase=*/1);

  if (cfg.pb_mode == PbMode::Complement) {
    est.pa_lower = clopper_pearson_lower({est.counts[est.top_class], cfg.n, 1.0 - cfg.alpha});
    est.pb_upper = 1.0 - est.pa_lower;
  } else {
    // alpha/2 on each side keeps the joint certificate at level alpha
    est.pa_lower = clopper_pearson_lower({est.counts[est.top_class], cfg.n, 1.0 - 0.5 * cfg.alpha});
    auto runner = est.counts;
    runner[est.top_class] = -1;
    int second = argmax_smallest_index(runner);
    std::int64_t nb = runner[second] < 0 ? 0 : runner[second];
    est.pb_upper = clopper_pearson_upper({nb, cfg.n, 1.0 - 0.5 * cfg.alpha});
  }
  return est;
}

double cohen_radius(double pa_lower, double pb_upper, double sigma) {
  if (!(sigma > 0.0)) throw std::domain_error("cohen_radius: sigma must be positive");
  if (!(pa_lower > 0.0 && pa_lower < 1.0 && pb_upper > 0.0 && pb_upper < 1.0))
    throw std::domain_error("cohen_radius: probabilities must be in (0,1)");
  if (pa_lower <= pb_upper) return 0.0;
  return 0.5 * sigma * (normal_quantile(pa_lower) - normal_quantile(pb_upper));
}

std::vector<std::pair<double, double>> linear_truncation_curve(double sigma,
                                                               const std::vector<double>& distances,
                                                               const SmoothingConfig& cfg) {
  validate(cfg);
  if (!(sigma > 0.0)) throw std::domain_error("linear_truncation_curve: sigma must be positive");
  std::vector<std::pair<double, double>> out;
  out.reserve(distances.size());
  for (double d : distances) {
    double pa_exact = normal_cdf(d / sigma);
    auto na = static_cast<std::int64_t>(std::llround(pa_exact * static_cast<double>(cfg.n)));
    na = std::clamp<std::int64_t>(na, 0, cfg.n);
    double radius = 0.0;
    if (na > 0) {
      double pa_lower = clopper_pearson_lower({na, cfg.n, 1.0 - cfg.alpha});
      if (pa_lower > 0.0 && pa_lower < 1.0) radius = cohen_radius(pa_lower, 1.0 - pa_lower, sigma);
    }
    out.emplace_back(d, radius);
  }
  return out;
}

} // namespace idrs
