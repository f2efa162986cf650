#pragma once

#include <cstddef>
#include <vector>

namespace ordac {

// Per-sample Gaussian label distribution over ordinal ranks. mu is a rank
// value in [0, C-1]; sigma is the uncertainty in rank units.
struct LabelDistribution {
  double mu = 0.0;
  double sigma = 1.0;
};

inline constexpr double kSigmaMin = 0.01;

// mu stays on the label scale: [0, C-1].
double clamp_mu(double mu, int class_count);

// sigma stays in [kSigmaMin, C]; unbounded growth flattens the distribution
// into uselessness, collapse to zero makes divergence targets degenerate.
double clamp_sigma(double sigma, int class_count);

// Discrete probability vector over the integer ranks 0..C-1.
struct RankDistribution {
  std::vector<double> probs;

  RankDistribution() = default;
  explicit RankDistribution(std::vector<double> p) : probs(std::move(p)) {}

  std::size_t size() const { return probs.size(); }
  double operator[](std::size_t c) const { return probs[c]; }
};

// Gaussian kernel on ranks 0..C-1, renormalized over the truncated support.
// Throws ConfigError when class_count < 2.
RankDistribution discretize(const LabelDistribution& dist, int class_count);

// Expectation sum_c c * probs[c]; requires a normalized input.
double expected_rank(const RankDistribution& rd);

// KL(target || predicted) with a 1e-12 floor inside both logs.
// Throws DimensionError on length mismatch.
double kl_divergence(const RankDistribution& target,
                     const RankDistribution& predicted);

// Rank bucket of a continuous rank value: clamp(round(mu), 0, C-1),
// ties at .5 rounding half away from zero. Shared by the correction engine
// and the evaluation metrics.
int class_of(double mu, int class_count);

inline int class_of(const LabelDistribution& dist, int class_count) {
  return class_of(dist.mu, class_count);
}

}  // namespace ordac
