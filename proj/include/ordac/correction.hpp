#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <vector>

#include "ordac/data.hpp"
#include "ordac/model.hpp"
#include "ordac/sample.hpp"

namespace ordac {

struct CorrectionParams {
  double alpha_base = 0.2;  // sigma update rate scale
  double beta_base = 0.8;   // mu update rate scale
  int max_epochs = 50;      // E_max
  int correction_start = 10;  // first 1-based epoch with corrections; a value
                              // above max_epochs disables correction entirely
  double std_init = 0.75;
  double epsilon = 1e-8;
  bool debias = true;

  void validate() const;  // throws ConfigError
};

struct SgdOptions {
  double learning_rate = 0.05;
  int batch_size = 32;
};

struct EpochStats {
  int epoch = 0;                 // 1-based
  double mean_train_loss = 0.0;  // mean over folds of per-fold epoch loss
  double mean_abs_mu_delta = 0.0;  // over samples corrected this epoch
  double mean_sigma = 0.0;         // over the whole pool, after corrections
  int corrected_count = 0;
  std::vector<int> class_counts;  // class_of(mu) histogram after the epoch
};

struct TrainResult {
  std::vector<std::unique_ptr<LdlModel>> models;
  std::vector<EpochStats> history;
};

// Per-class mean of out-of-fold predictions, bucketed by class_of(mu).
// count[c] == 0 marks an absent class with no defined mean.
struct ClassStats {
  std::vector<double> mean;
  std::vector<int> count;
};

ClassStats class_wise_means(std::span<const double> preds,
                            std::span<const int> classes, int class_count);

// Re-centers each prediction so the class mean lands on the class index:
// shifted_i = pred_i - (mean_{c_i} - c_i). Every sample's class must have a
// defined mean.
std::vector<double> shift_predictions(std::span<const double> preds,
                                      std::span<const int> classes,
                                      const ClassStats& stats);

struct CorrectionRates {
  double lambda = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
};

// lambda = gamma / (1 - ln(N_c/N + epsilon)); rates are the bases scaled by
// lambda. Rare classes get smaller lambda, so they are corrected more
// cautiously. class_members == 0 is an internal invariant violation.
CorrectionRates correction_coefficient(double gamma, int class_members,
                                       int fold_total,
                                       const CorrectionParams& params);

// Simultaneous update from the old state:
//   e         = y_shifted - mu
//   sigma_new = clamp(sigma + alpha_i * (|e| - sigma))
//   mu_new    = clamp(mu + beta_i * e)
LabelDistribution update_distribution(const LabelDistribution& dist,
                                      double y_shifted, double alpha_i,
                                      double beta_i, int class_count);

// Full per-fold pipeline over prediction arrays: bucket by class_of(mu),
// class-wise means, optional debias shift, then one update per sample.
// Class statistics come from exactly this prediction set (fold-local).
std::vector<LabelDistribution> apply_corrections(
    std::span<const double> y_hat, std::span<const double> gamma,
    std::span<const LabelDistribution> dists, const CorrectionParams& params,
    int class_count);

// Out-of-fold correction of one validation fold: predicts with model_k,
// applies the correction pipeline, and returns id -> new distribution
// without mutating any input.
std::map<int, LabelDistribution> correct_fold(const LdlModel& model,
                                              const Dataset& data,
                                              std::span<const int> valid_ids,
                                              const CorrectionParams& params);

// The cross-training loop. Each epoch every fold model trains one epoch on
// its training view (targets are discretize(current dist)); from epoch
// correction_start onward each model corrects its own validation fold and
// the merged corrections are written back to `data` at the epoch barrier,
// in fold order then id order. Returns the K trained models and the
// per-epoch history; `data` ends up holding the corrected pool.
TrainResult ordac_train(Dataset& data, const FoldPlan& plan,
                        const CorrectionParams& params,
                        const LdlModel& prototype, const SgdOptions& sgd,
                        std::span<const std::uint64_t> model_seeds);

// Trains a fresh model from scratch for max_epochs on the corrected pool,
// with no online correction. Per-epoch mean losses are appended to
// epoch_losses when given.
std::unique_ptr<LdlModel> train_on_corrected(
    const Dataset& clean, const CorrectionParams& params,
    const LdlModel& prototype, const SgdOptions& sgd, std::uint64_t seed,
    std::vector<double>* epoch_losses = nullptr);

struct FilterResult {
  Dataset kept;  // re-indexed densely
  std::vector<int> removed_ids;
};

// Drops exactly the samples whose sigma failed to decrease below its initial
// value (sigma >= std_init, inclusive).
FilterResult filter_uncertain(const Dataset& ds, double std_init);

// Training view over a subset of the pool; targets are discretized from the
// samples' current distributions.
TrainingSet make_training_set(const Dataset& ds, std::span<const int> ids);

}  // namespace ordac
