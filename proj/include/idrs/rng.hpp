#pragma once

#include <cmath>
#include <cstdint>
#include <span>

namespace idrs {

// SplitMix64 finalizer; the basis for counter-derived streams.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Pure function of (seed, a, b, c): sampling results are independent of
// batching and scheduling order because every sample owns its stream.
constexpr std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                                      std::uint64_t c = 0) {
  std::uint64_t s = mix64(seed ^ 0x6a09e667f3bcc908ULL);
  s = mix64(s ^ a);
  s = mix64(s ^ b);
  s = mix64(s ^ c);
  return s;
}

class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t stream_seed) : state_(stream_seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in (0, 1]
  double next_uniform() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * (1.0 / 9007199254740992.0);
  }

  // standard normal via Box-Muller, one spare cached per pair
  double next_gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = next_uniform();
    double u2 = next_uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 6.283185307179586 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  void fill_gaussian(std::span<double> out) {
    for (auto& v : out) v = next_gaussian();
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Marsaglia-Tsang gamma(shape, 1) sampler; shape boosting covers shape < 1.
inline double gamma_draw(GaussianStream& g, double shape) {
  if (shape < 1.0) {
    double u = g.next_uniform();
    return gamma_draw(g, shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  double d = shape - 1.0 / 3.0;
  double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = g.next_gaussian();
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    double u = g.next_uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

inline double chi_squared_draw(GaussianStream& g, double dof) {
  return 2.0 * gamma_draw(g, 0.5 * dof);
}

} // namespace idrs
