#pragma once

#include <cstdint>
#include <vector>

namespace ordac {

// Row-stochastic transition matrix for asymmetric label noise. Row i gives
// the flip probabilities of true rank i: the diagonal holds 1-tau and the
// off-diagonal mass tau decays as a Gaussian of the rank distance.
struct NoiseMatrix {
  int class_count = 0;
  double tau = 0.0;      // target overall noise rate
  double sigma_n = 3.0;  // kernel width in rank units
  std::vector<double> entries;  // row-major C x C

  double at(int i, int j) const {
    return entries[static_cast<std::size_t>(i) *
                       static_cast<std::size_t>(class_count) +
                   static_cast<std::size_t>(j)];
  }
};

// T_ii = 1 - tau; T_ij (j != i) = tau * w_ij / sum_{k != i} w_ik with
// w_ij = exp(-(i-j)^2 / (2 sigma_n^2)). Every class flips with probability
// exactly tau, which makes the overall rate tau independent of class priors.
// Throws ConfigError unless class_count >= 2, 0 <= tau < 1, sigma_n > 0.
NoiseMatrix build_noise_matrix(int class_count, double tau, double sigma_n);

// Draws each noisy label independently from row labels[i] with a generator
// seeded by `seed`; identical (labels, matrix, seed) give identical output.
// Throws DataError naming the offending index if a label is out of range.
std::vector<int> inject_noise(const std::vector<int>& labels,
                              const NoiseMatrix& matrix, std::uint64_t seed);

}  // namespace ordac
