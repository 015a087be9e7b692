#include "rmtnet/powerlaw.hpp"

#include <algorithm>
#include <cmath>

#include "rmtnet/error.hpp"

namespace rmt {

PowerLawFit fit_power_law(std::span<const double> samples, std::size_t min_tail) {
  if (samples.size() < min_tail) {
    throw Error(Errc::TooFewSamples, std::to_string(samples.size()) + " samples, need " +
                                         std::to_string(min_tail));
  }
  std::vector<double> xs(samples.begin(), samples.end());
  for (double x : xs) {
    if (!(x >= 1.0)) throw Error(Errc::InvariantViolation, "samples must be positive integers");
  }
  std::sort(xs.begin(), xs.end());
  if (xs.front() == xs.back()) {
    throw Error(Errc::DegenerateSamples, "all samples equal");
  }

  const std::size_t n = xs.size();
  // suffix sums of ln(x) for O(1) tail MLE per candidate
  std::vector<double> log_suffix(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    log_suffix[i] = log_suffix[i + 1] + std::log(xs[i]);
  }

  bool found = false;
  PowerLawFit best;
  std::size_t i = 0;
  while (i < n) {
    const double x_min = xs[i];
    std::size_t j = i;  // first index of the tail
    const std::size_t tail_n = n - i;
    if (tail_n < min_tail) break;
    // skip degenerate tails (all values equal)
    if (xs[i] != xs[n - 1]) {
      const double shifted = x_min - 0.5;
      const double log_sum = log_suffix[i] - static_cast<double>(tail_n) * std::log(shifted);
      if (log_sum > 0.0) {
        const double alpha = 1.0 + static_cast<double>(tail_n) / log_sum;
        if (alpha > 1.0) {
          // KS distance between the empirical tail CDF and the fitted CDF
          // F(x) = 1 - ((x + 1/2) / (x_min - 1/2))^(1 - alpha)
          double ks = 0.0;
          std::size_t seen = 0;
          std::size_t p = i;
          while (p < n) {
            const double v = xs[p];
            std::size_t q = p;
            while (q < n && xs[q] == v) ++q;
            seen += q - p;
            const double ecdf = static_cast<double>(seen) / static_cast<double>(tail_n);
            const double fcdf = 1.0 - std::pow((v + 0.5) / shifted, 1.0 - alpha);
            ks = std::max(ks, std::abs(ecdf - fcdf));
            p = q;
          }
          if (!found || ks < best.ks) {
            found = true;
            best.alpha = alpha;
            best.x_min = x_min;
            best.n_tail = tail_n;
            best.ks = ks;
          }
        }
      }
    }
    // advance to the next distinct value
    while (j < n && xs[j] == x_min) ++j;
    i = j;
  }

  if (!found) {
    throw Error(Errc::TooFewSamples, "no candidate x_min leaves a usable tail");
  }
  return best;
}

PowerLawFit fit_power_law(std::span<const int> samples, std::size_t min_tail) {
  std::vector<double> xs(samples.begin(), samples.end());
  return fit_power_law(std::span<const double>(xs), min_tail);
}

std::vector<int> sample_power_law(double alpha, int x_min, std::size_t n, Rng& rng) {
  if (alpha <= 1.0 || x_min < 1) {
    throw Error(Errc::ConfigInvalid, "power-law sampler needs alpha > 1 and x_min >= 1");
  }
  std::vector<int> out;
  out.reserve(n);
  const double shifted = static_cast<double>(x_min) - 0.5;
  const double exponent = -1.0 / (alpha - 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    double u = rng.uniform();
    while (u >= 1.0) u = rng.uniform();
    const double x = shifted * std::pow(1.0 - u, exponent) + 0.5;
    // clamp to a sane integer range; the tail beyond 2^31 is vanishingly rare
    const double clamped = std::min(x, 2.0e9);
    out.push_back(static_cast<int>(clamped));
  }
  return out;
}

}  // namespace rmt
