#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace mixdyn {

/// Seeded random stream with portable draw logic. The raw generator is
/// mt19937_64 (its integer sequence is pinned by the standard); all
/// floating-point conversions are done here rather than through
/// std::*_distribution so that equal seeds give equal draws everywhere.
class RandomStream {
 public:
  static constexpr const char* kAlgorithm = "mt19937_64/u53/box-muller/marsaglia-tsang";

  explicit RandomStream(std::uint64_t seed) : seed_(seed), gen_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1].
  double uniform_pos() {
    return (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller. Two uniforms are consumed per draw; no
  /// second-value caching, so the stream position is a pure function of the
  /// number of calls.
  double normal() {
    const double u1 = uniform_pos();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  /// Gamma(shape, 1) via Marsaglia-Tsang, with the u^(1/shape) boost for
  /// shape < 1.
  double gamma(double shape) {
    if (shape < 1.0) {
      const double u = uniform_pos();
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform_pos();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  double beta(double a, double b) {
    const double x = gamma(a);
    const double y = gamma(b);
    return x / (x + y);
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 gen_;
};

}  // namespace mixdyn
