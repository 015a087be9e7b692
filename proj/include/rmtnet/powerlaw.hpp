#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rmtnet/rng.hpp"

namespace rmt {

struct PowerLawFit {
  double alpha = 0.0;
  double x_min = 1.0;
  std::size_t n_tail = 0;
  double ks = 0.0;
};

/// Discrete power-law tail fit. For each candidate x_min (every distinct
/// sample value with at least `min_tail` tail samples) the exponent is the
/// continuous-approximation MLE
///     alpha = 1 + n / sum(ln(x_i / (x_min - 1/2)))
/// and the candidate minimizing the KS distance between the empirical and
/// fitted tail CDFs wins. Throws TooFewSamples / DegenerateSamples.
PowerLawFit fit_power_law(std::span<const double> samples, std::size_t min_tail = 50);
PowerLawFit fit_power_law(std::span<const int> samples, std::size_t min_tail = 50);

/// Inverse-CDF sampler for the same discrete model family the fit assumes
/// (continuous power law rounded to the nearest integer). Used as the
/// recovery oracle in tests and by the simulator's consumer graph.
std::vector<int> sample_power_law(double alpha, int x_min, std::size_t n, Rng& rng);

}  // namespace rmt
