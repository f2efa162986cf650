#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "ordac/label_dist.hpp"

namespace ordac {

// One epoch's training view: feature rows aligned with target distributions.
// Rows reference storage owned by the caller.
struct TrainingSet {
  std::vector<std::span<const double>> features;
  std::vector<RankDistribution> targets;

  std::size_t size() const { return features.size(); }
};

struct FitConfig {
  double learning_rate = 0.05;
  int batch_size = 32;
  std::uint64_t shuffle_seed = 0;
  int epoch_index = 0;  // reported by TrainingDivergedError
};

struct PredictOutcome {
  double y_hat = 0.0;  // expected rank of the predicted distribution
  double gamma = 0.0;  // confidence, 1 - H(probs)/ln(C), in [0, 1]
};

// Behavioral contract for rank-distribution regressors. One instance is
// exclusively owned by one fold worker while fitting; prediction on a frozen
// model is safe for concurrent readers.
class LdlModel {
 public:
  virtual ~LdlModel() = default;

  virtual int input_dim() const = 0;
  virtual int class_count() const = 0;

  // Deterministic; output is a valid RankDistribution for every input.
  virtual RankDistribution forward(std::span<const double> x) const = 0;

  // One pass of seeded mini-batch gradient descent on the divergence loss.
  // Returns the mean pre-update loss. Throws TrainingDivergedError when a
  // batch loss goes non-finite.
  virtual double fit_epoch(const TrainingSet& data, const FitConfig& fit) = 0;

  // Fresh re-initialized copy of the same architecture; the same seed yields
  // a functionally identical initial model.
  virtual std::unique_ptr<LdlModel> clone_initial(std::uint64_t seed) const = 0;
};

// Expectation readout plus normalized-entropy confidence.
PredictOutcome predict_rank(const LdlModel& model, std::span<const double> x);

}  // namespace ordac
