#include "ordac/noise.hpp"

#include <cmath>
#include <string>

#include "ordac/errors.hpp"
#include "ordac/rng.hpp"

namespace ordac {

NoiseMatrix build_noise_matrix(int class_count, double tau, double sigma_n) {
  if (class_count < 2) {
    throw ConfigError("build_noise_matrix: rank count must be >= 2, got " +
                      std::to_string(class_count));
  }
  if (!(tau >= 0.0 && tau < 1.0)) {
    throw ConfigError("build_noise_matrix: tau must lie in [0, 1), got " +
                      std::to_string(tau));
  }
  if (!(sigma_n > 0.0)) {
    throw ConfigError("build_noise_matrix: sigma_n must be > 0, got " +
                      std::to_string(sigma_n));
  }

  NoiseMatrix m;
  m.class_count = class_count;
  m.tau = tau;
  m.sigma_n = sigma_n;
  const std::size_t C = static_cast<std::size_t>(class_count);
  m.entries.assign(C * C, 0.0);

  const double inv_two_var = 1.0 / (2.0 * sigma_n * sigma_n);
  for (std::size_t i = 0; i < C; ++i) {
    double off_total = 0.0;
    for (std::size_t j = 0; j < C; ++j) {
      if (j == i) continue;
      const double d = static_cast<double>(i) - static_cast<double>(j);
      const double w = std::exp(-d * d * inv_two_var);
      m.entries[i * C + j] = w;
      off_total += w;
    }
    for (std::size_t j = 0; j < C; ++j) {
      if (j == i) {
        m.entries[i * C + j] = 1.0 - tau;
      } else {
        m.entries[i * C + j] *= tau / off_total;
      }
    }
  }
  return m;
}

std::vector<int> inject_noise(const std::vector<int>& labels,
                              const NoiseMatrix& matrix, std::uint64_t seed) {
  const int C = matrix.class_count;
  Rng rng(seed);
  std::vector<int> noisy(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int label = labels[i];
    if (label < 0 || label >= C) {
      throw DataError("inject_noise: label " + std::to_string(label) +
                      " at index " + std::to_string(i) +
                      " is outside 0.." + std::to_string(C - 1));
    }
    const double u = rng.next_double();
    double cum = 0.0;
    int drawn = C - 1;  // guards against rounding in the final bucket
    for (int j = 0; j < C; ++j) {
      cum += matrix.at(label, j);
      if (u < cum) {
        drawn = j;
        break;
      }
    }
    noisy[i] = drawn;
  }
  return noisy;
}

}  // namespace ordac
