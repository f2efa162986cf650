#include "ordac/label_dist.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ordac/errors.hpp"

namespace ordac {

double clamp_mu(double mu, int class_count) {
  return std::clamp(mu, 0.0, static_cast<double>(class_count - 1));
}

double clamp_sigma(double sigma, int class_count) {
  return std::clamp(sigma, kSigmaMin, static_cast<double>(class_count));
}

RankDistribution discretize(const LabelDistribution& dist, int class_count) {
  if (class_count < 2) {
    throw ConfigError("discretize: rank count must be >= 2, got " +
                      std::to_string(class_count));
  }
  std::vector<double> probs(static_cast<std::size_t>(class_count));
  const double inv_two_var = 1.0 / (2.0 * dist.sigma * dist.sigma);
  // Work with shifted exponents so a narrow sigma cannot underflow every
  // kernel entry at once.
  double max_exponent = -std::numeric_limits<double>::infinity();
  std::vector<double> exponents(probs.size());
  for (int c = 0; c < class_count; ++c) {
    const double delta = static_cast<double>(c) - dist.mu;
    exponents[static_cast<std::size_t>(c)] = -delta * delta * inv_two_var;
    max_exponent = std::max(max_exponent, exponents[static_cast<std::size_t>(c)]);
  }
  double total = 0.0;
  for (std::size_t c = 0; c < probs.size(); ++c) {
    probs[c] = std::exp(exponents[c] - max_exponent);
    total += probs[c];
  }
  for (double& p : probs) p /= total;
  return RankDistribution(std::move(probs));
}

double expected_rank(const RankDistribution& rd) {
  double acc = 0.0;
  for (std::size_t c = 0; c < rd.size(); ++c) {
    acc += static_cast<double>(c) * rd[c];
  }
  return acc;
}

double kl_divergence(const RankDistribution& target,
                     const RankDistribution& predicted) {
  if (target.size() != predicted.size()) {
    throw DimensionError("kl_divergence: length mismatch, " +
                         std::to_string(target.size()) + " vs " +
                         std::to_string(predicted.size()));
  }
  constexpr double kFloor = 1e-12;
  double acc = 0.0;
  for (std::size_t c = 0; c < target.size(); ++c) {
    acc += target[c] * (std::log(target[c] + kFloor) - std::log(predicted[c] + kFloor));
  }
  return acc;
}

int class_of(double mu, int class_count) {
  const long long rounded = std::llround(mu);  // half away from zero
  const long long hi = class_count - 1;
  return static_cast<int>(std::clamp(rounded, 0ll, hi));
}

}  // namespace ordac
