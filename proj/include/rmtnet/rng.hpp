#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace rmt {

/// Deterministic random stream. Wraps std::mt19937_64 but derives every
/// draw from raw 64-bit outputs only, because the std distribution adaptors
/// are implementation-defined and would break byte-for-byte reproducibility
/// across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform double in [0, 1) with 53 bits of entropy.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Unbiased integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = n * (UINT64_MAX / n);
    std::uint64_t v;
    do {
      v = gen_();
    } while (v >= limit);
    return v % n;
  }

  /// Inclusive integer range.
  std::int64_t range(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  bool bernoulli(double p) { return uniform() < p; }

  double normal(double mu = 0.0, double sigma = 1.0) {
    if (have_spare_) {
      have_spare_ = false;
      return mu + sigma * spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return mu + sigma * r * std::cos(theta);
  }

  double lognormal(double mu, double sigma) { return std::exp(normal(mu, sigma)); }

  /// Knuth inversion; fine for the small rates used here.
  int poisson(double lambda) {
    if (lambda <= 0.0) return 0;
    if (lambda > 64.0) {
      // normal approximation, clamped at zero
      const double v = normal(lambda, std::sqrt(lambda));
      return v < 0.0 ? 0 : static_cast<int>(v + 0.5);
    }
    const double limit = std::exp(-lambda);
    double prod = uniform();
    int n = 0;
    while (prod > limit) {
      prod *= uniform();
      ++n;
    }
    return n;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

  /// Index draw proportional to the given non-negative weights.
  std::size_t weighted(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double x = uniform() * total;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
      x -= weights[i];
      if (x < 0.0) return i;
    }
    return weights.empty() ? 0 : weights.size() - 1;
  }

  /// Independent child stream; stable under reordering of other draws.
  Rng fork(std::uint64_t stream) const {
    // splitmix64 over (seed ^ stream); decouples substreams from draw order
    std::uint64_t z = seed_mix_ ^ (stream + 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return Rng(z ^ (z >> 31));
  }

  void note_seed(std::uint64_t s) { seed_mix_ = s; }

  static Rng seeded(std::uint64_t seed) {
    Rng r(seed);
    r.note_seed(seed);
    return r;
  }

 private:
  std::mt19937_64 gen_;
  std::uint64_t seed_mix_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace rmt
