#include "ordac/correction.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <stdexcept>
#include <string>

#include "ordac/errors.hpp"
#include "ordac/rng.hpp"

namespace ordac {

void CorrectionParams::validate() const {
  if (alpha_base < 0.0 || beta_base < 0.0) {
    throw ConfigError("correction: alpha_base and beta_base must be >= 0");
  }
  if (max_epochs < 1) {
    throw ConfigError("correction: max_epochs must be >= 1");
  }
  if (correction_start < 1) {
    throw ConfigError("correction: correction_start must be >= 1");
  }
  if (!(std_init >= kSigmaMin)) {
    throw ConfigError("correction: std_init must be >= " +
                      std::to_string(kSigmaMin));
  }
  if (!(epsilon > 0.0)) {
    throw ConfigError("correction: epsilon must be > 0");
  }
}

ClassStats class_wise_means(std::span<const double> preds,
                            std::span<const int> classes, int class_count) {
  if (preds.size() != classes.size()) {
    throw DimensionError("class_wise_means: size mismatch");
  }
  ClassStats stats;
  stats.mean.assign(static_cast<std::size_t>(class_count), 0.0);
  stats.count.assign(static_cast<std::size_t>(class_count), 0);
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const int c = classes[i];
    if (c < 0 || c >= class_count) {
      throw DataError("class_wise_means: class " + std::to_string(c) +
                      " out of range");
    }
    stats.mean[static_cast<std::size_t>(c)] += preds[i];
    ++stats.count[static_cast<std::size_t>(c)];
  }
  for (std::size_t c = 0; c < stats.mean.size(); ++c) {
    if (stats.count[c] > 0) {
      stats.mean[c] /= static_cast<double>(stats.count[c]);
    } else {
      stats.mean[c] = 0.0;  // absent; count[c] == 0 is the marker
    }
  }
  return stats;
}

std::vector<double> shift_predictions(std::span<const double> preds,
                                      std::span<const int> classes,
                                      const ClassStats& stats) {
  std::vector<double> shifted(preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const std::size_t c = static_cast<std::size_t>(classes[i]);
    if (stats.count[c] == 0) {
      throw std::logic_error("shift_predictions: class " + std::to_string(c) +
                             " has no defined mean");
    }
    shifted[i] = preds[i] - (stats.mean[c] - static_cast<double>(classes[i]));
  }
  return shifted;
}

CorrectionRates correction_coefficient(double gamma, int class_members,
                                       int fold_total,
                                       const CorrectionParams& params) {
  if (class_members <= 0 || class_members > fold_total) {
    throw std::logic_error(
        "correction_coefficient: cannot correct a sample in an empty class");
  }
  const double pi =
      static_cast<double>(class_members) / static_cast<double>(fold_total);
  CorrectionRates rates;
  rates.lambda = gamma / (1.0 - std::log(pi + params.epsilon));
  rates.alpha = params.alpha_base * rates.lambda;
  rates.beta = params.beta_base * rates.lambda;
  return rates;
}

LabelDistribution update_distribution(const LabelDistribution& dist,
                                      double y_shifted, double alpha_i,
                                      double beta_i, int class_count) {
  const double error = y_shifted - dist.mu;
  LabelDistribution updated;
  updated.sigma = clamp_sigma(
      dist.sigma + alpha_i * (std::abs(error) - dist.sigma), class_count);
  updated.mu = clamp_mu(dist.mu + beta_i * error, class_count);
  return updated;
}

std::vector<LabelDistribution> apply_corrections(
    std::span<const double> y_hat, std::span<const double> gamma,
    std::span<const LabelDistribution> dists, const CorrectionParams& params,
    int class_count) {
  if (y_hat.size() != gamma.size() || y_hat.size() != dists.size()) {
    throw DimensionError("apply_corrections: size mismatch");
  }
  const int total = static_cast<int>(dists.size());

  std::vector<int> classes(dists.size());
  for (std::size_t i = 0; i < dists.size(); ++i) {
    classes[i] = class_of(dists[i], class_count);
  }
  const ClassStats stats = class_wise_means(y_hat, classes, class_count);
  const std::vector<double> shifted =
      params.debias ? shift_predictions(y_hat, classes, stats)
                    : std::vector<double>(y_hat.begin(), y_hat.end());

  std::vector<LabelDistribution> updated(dists.size());
  for (std::size_t i = 0; i < dists.size(); ++i) {
    const CorrectionRates rates = correction_coefficient(
        gamma[i], stats.count[static_cast<std::size_t>(classes[i])], total,
        params);
    updated[i] = update_distribution(dists[i], shifted[i], rates.alpha,
                                     rates.beta, class_count);
  }
  return updated;
}

std::map<int, LabelDistribution> correct_fold(const LdlModel& model,
                                              const Dataset& data,
                                              std::span<const int> valid_ids,
                                              const CorrectionParams& params) {
  if (valid_ids.empty()) {
    throw ConfigError("correct_fold: empty validation fold");
  }
  std::vector<double> y_hat(valid_ids.size());
  std::vector<double> gamma(valid_ids.size());
  std::vector<LabelDistribution> dists(valid_ids.size());
  for (std::size_t i = 0; i < valid_ids.size(); ++i) {
    const Sample& s = data.samples[static_cast<std::size_t>(valid_ids[i])];
    const PredictOutcome pred = predict_rank(model, s.features);
    y_hat[i] = pred.y_hat;
    gamma[i] = pred.gamma;
    dists[i] = s.dist;
  }
  const std::vector<LabelDistribution> updated =
      apply_corrections(y_hat, gamma, dists, params, data.class_count);

  std::map<int, LabelDistribution> corrected;
  for (std::size_t i = 0; i < valid_ids.size(); ++i) {
    corrected[valid_ids[i]] = updated[i];
  }
  return corrected;
}

TrainingSet make_training_set(const Dataset& ds, std::span<const int> ids) {
  TrainingSet ts;
  ts.features.reserve(ids.size());
  ts.targets.reserve(ids.size());
  for (const int id : ids) {
    const Sample& s = ds.samples[static_cast<std::size_t>(id)];
    ts.features.emplace_back(s.features);
    ts.targets.push_back(discretize(s.dist, ds.class_count));
  }
  return ts;
}

namespace {

void check_plan(const Dataset& data, const FoldPlan& plan,
                std::size_t seed_count) {
  if (plan.assignment.size() != data.size()) {
    throw ConfigError("ordac_train: fold plan covers " +
                      std::to_string(plan.assignment.size()) +
                      " samples, dataset has " + std::to_string(data.size()));
  }
  if (plan.fold_count < 2) {
    throw ConfigError("ordac_train: need at least 2 folds");
  }
  if (seed_count != static_cast<std::size_t>(plan.fold_count)) {
    throw ConfigError("ordac_train: need one model seed per fold");
  }
  for (const int f : plan.assignment) {
    if (f < 0 || f >= plan.fold_count) {
      throw ConfigError("ordac_train: fold index out of range");
    }
  }
}

std::vector<int> pool_class_counts(const Dataset& data) {
  std::vector<int> counts(static_cast<std::size_t>(data.class_count), 0);
  for (const Sample& s : data.samples) {
    ++counts[static_cast<std::size_t>(class_of(s.dist, data.class_count))];
  }
  return counts;
}

double pool_mean_sigma(const Dataset& data) {
  double acc = 0.0;
  for (const Sample& s : data.samples) acc += s.dist.sigma;
  return acc / static_cast<double>(data.size());
}

}  // namespace

TrainResult ordac_train(Dataset& data, const FoldPlan& plan,
                        const CorrectionParams& params,
                        const LdlModel& prototype, const SgdOptions& sgd,
                        std::span<const std::uint64_t> model_seeds) {
  params.validate();
  check_plan(data, plan, model_seeds.size());
  const int folds = plan.fold_count;

  TrainResult result;
  result.models.reserve(static_cast<std::size_t>(folds));
  for (int k = 0; k < folds; ++k) {
    result.models.push_back(prototype.clone_initial(model_seeds[k]));
  }

  std::vector<std::vector<int>> train_views(static_cast<std::size_t>(folds));
  std::vector<std::vector<int>> valid_views(static_cast<std::size_t>(folds));
  for (int k = 0; k < folds; ++k) {
    train_views[static_cast<std::size_t>(k)] = plan.train_ids(k);
    valid_views[static_cast<std::size_t>(k)] = plan.valid_ids(k);
    if (valid_views[static_cast<std::size_t>(k)].empty()) {
      throw ConfigError("ordac_train: fold " + std::to_string(k) +
                        " has no validation samples");
    }
  }

  for (int epoch = 1; epoch <= params.max_epochs; ++epoch) {
    // Train phase. The pool is read-only here, so fold workers run
    // concurrently; each owns its model and derives its own shuffle seed.
    std::vector<std::future<double>> train_jobs;
    train_jobs.reserve(static_cast<std::size_t>(folds));
    for (int k = 0; k < folds; ++k) {
      train_jobs.push_back(std::async(std::launch::async, [&, k, epoch]() {
        const TrainingSet ts =
            make_training_set(data, train_views[static_cast<std::size_t>(k)]);
        FitConfig fit;
        fit.learning_rate = sgd.learning_rate;
        fit.batch_size = sgd.batch_size;
        fit.shuffle_seed = derive_seed(model_seeds[static_cast<std::size_t>(k)],
                                       seed_stream::kShuffle,
                                       static_cast<std::uint64_t>(epoch));
        fit.epoch_index = epoch;
        return result.models[static_cast<std::size_t>(k)]->fit_epoch(ts, fit);
      }));
    }
    double loss_sum = 0.0;
    for (auto& job : train_jobs) loss_sum += job.get();

    EpochStats stats;
    stats.epoch = epoch;
    stats.mean_train_loss = loss_sum / static_cast<double>(folds);

    if (epoch >= params.correction_start) {
      // Correction phase: out-of-fold only, each model scores exactly the
      // fold it never trained on.
      std::vector<std::future<std::map<int, LabelDistribution>>> corr_jobs;
      corr_jobs.reserve(static_cast<std::size_t>(folds));
      for (int k = 0; k < folds; ++k) {
        corr_jobs.push_back(std::async(std::launch::async, [&, k]() {
          return correct_fold(*result.models[static_cast<std::size_t>(k)],
                              data, valid_views[static_cast<std::size_t>(k)],
                              params);
        }));
      }
      // Barrier: a single writer applies the merged maps in fold order,
      // then id order within each fold.
      double mu_delta_sum = 0.0;
      int corrected = 0;
      for (int k = 0; k < folds; ++k) {
        const std::map<int, LabelDistribution> fold_corr =
            corr_jobs[static_cast<std::size_t>(k)].get();
        for (const auto& [id, dist] : fold_corr) {
          if (plan.assignment[static_cast<std::size_t>(id)] != k) {
            throw std::logic_error(
                "ordac_train: fold " + std::to_string(k) +
                " corrected sample " + std::to_string(id) +
                " outside its validation fold");
          }
          Sample& s = data.samples[static_cast<std::size_t>(id)];
          mu_delta_sum += std::abs(dist.mu - s.dist.mu);
          s.dist = dist;
          ++corrected;
        }
      }
      stats.corrected_count = corrected;
      stats.mean_abs_mu_delta =
          corrected > 0 ? mu_delta_sum / static_cast<double>(corrected) : 0.0;
    }

    stats.mean_sigma = pool_mean_sigma(data);
    stats.class_counts = pool_class_counts(data);
    result.history.push_back(std::move(stats));
  }
  return result;
}

std::unique_ptr<LdlModel> train_on_corrected(
    const Dataset& clean, const CorrectionParams& params,
    const LdlModel& prototype, const SgdOptions& sgd, std::uint64_t seed,
    std::vector<double>* epoch_losses) {
  params.validate();
  std::vector<int> all_ids(clean.size());
  for (std::size_t i = 0; i < clean.size(); ++i) {
    all_ids[i] = static_cast<int>(i);
  }
  const TrainingSet ts = make_training_set(clean, all_ids);

  std::unique_ptr<LdlModel> model = prototype.clone_initial(seed);
  for (int epoch = 1; epoch <= params.max_epochs; ++epoch) {
    FitConfig fit;
    fit.learning_rate = sgd.learning_rate;
    fit.batch_size = sgd.batch_size;
    fit.shuffle_seed = derive_seed(seed, seed_stream::kShuffle,
                                   static_cast<std::uint64_t>(epoch));
    fit.epoch_index = epoch;
    const double loss = model->fit_epoch(ts, fit);
    if (epoch_losses) epoch_losses->push_back(loss);
  }
  return model;
}

FilterResult filter_uncertain(const Dataset& ds, double std_init) {
  std::vector<int> kept_ids;
  FilterResult result;
  for (const Sample& s : ds.samples) {
    if (s.dist.sigma >= std_init) {
      result.removed_ids.push_back(s.id);
    } else {
      kept_ids.push_back(s.id);
    }
  }
  result.kept = subset(ds, kept_ids);
  return result;
}

}  // namespace ordac
