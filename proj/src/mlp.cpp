#include "ordac/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "ordac/errors.hpp"
#include "ordac/rng.hpp"

namespace ordac {

namespace {
constexpr double kLogFloor = 1e-12;
constexpr const char* kCheckpointFormat = "ordac-mlp-v1";
}  // namespace

MlpRegressor::MlpRegressor(int input_dim, int hidden_dim, int class_count,
                           std::uint64_t seed)
    : input_dim_(input_dim),
      hidden_dim_(hidden_dim),
      class_count_(class_count),
      init_seed_(seed) {
  if (input_dim < 1 || hidden_dim < 1 || class_count < 2) {
    throw ConfigError("MlpRegressor: need input_dim >= 1, hidden_dim >= 1, "
                      "class_count >= 2");
  }
  const std::size_t d = static_cast<std::size_t>(input_dim);
  const std::size_t h = static_cast<std::size_t>(hidden_dim);
  const std::size_t c = static_cast<std::size_t>(class_count);
  w1_.resize(h * d);
  b1_.assign(h, 0.0);
  w2_.resize(c * h);
  b2_.assign(c, 0.0);

  Rng rng(derive_seed(seed, seed_stream::kModelInit));
  const double s1 = std::sqrt(2.0 / static_cast<double>(d));
  for (double& w : w1_) w = s1 * rng.next_gaussian();
  const double s2 = std::sqrt(2.0 / static_cast<double>(h));
  for (double& w : w2_) w = s2 * rng.next_gaussian();
}

RankDistribution MlpRegressor::forward(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != input_dim_) {
    throw DimensionError("MlpRegressor::forward: expected " +
                         std::to_string(input_dim_) + " features, got " +
                         std::to_string(x.size()));
  }
  const std::size_t d = static_cast<std::size_t>(input_dim_);
  const std::size_t h = static_cast<std::size_t>(hidden_dim_);
  const std::size_t c = static_cast<std::size_t>(class_count_);

  std::vector<double> hidden(h);
  for (std::size_t j = 0; j < h; ++j) {
    double z = b1_[j];
    const double* row = &w1_[j * d];
    for (std::size_t i = 0; i < d; ++i) z += row[i] * x[i];
    hidden[j] = z > 0.0 ? z : 0.0;
  }

  std::vector<double> probs(c);
  double zmax = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < c; ++k) {
    double z = b2_[k];
    const double* row = &w2_[k * h];
    for (std::size_t j = 0; j < h; ++j) z += row[j] * hidden[j];
    probs[k] = z;
    zmax = std::max(zmax, z);
  }
  double total = 0.0;
  for (std::size_t k = 0; k < c; ++k) {
    probs[k] = std::exp(probs[k] - zmax);
    total += probs[k];
  }
  for (double& p : probs) p /= total;
  return RankDistribution(std::move(probs));
}

// Shared forward/backward pass over one batch. The output gradient is the
// exact derivative of the floored-log loss, including the p/(p+eps) factor,
// so finite differences of batch_loss agree with it to rounding error.
void MlpRegressor::step(const TrainingSet& data,
                        std::span<const std::size_t> idx, double* loss_out,
                        std::vector<double>* grad_out) const {
  const std::size_t d = static_cast<std::size_t>(input_dim_);
  const std::size_t h = static_cast<std::size_t>(hidden_dim_);
  const std::size_t c = static_cast<std::size_t>(class_count_);
  const double inv_batch = 1.0 / static_cast<double>(idx.size());

  if (grad_out) grad_out->assign(parameter_count(), 0.0);
  double* gw1 = grad_out ? grad_out->data() : nullptr;
  double* gb1 = gw1 ? gw1 + h * d : nullptr;
  double* gw2 = gb1 ? gb1 + h : nullptr;
  double* gb2 = gw2 ? gw2 + c * h : nullptr;

  double loss = 0.0;
  std::vector<double> pre(h), hidden(h), probs(c), dlogits(c), dhidden(h);
  for (const std::size_t row : idx) {
    const std::span<const double> x = data.features[row];
    if (static_cast<int>(x.size()) != input_dim_) {
      throw DimensionError("MlpRegressor: feature row has " +
                           std::to_string(x.size()) + " entries, expected " +
                           std::to_string(input_dim_));
    }
    const RankDistribution& target = data.targets[row];
    if (target.size() != c) {
      throw DimensionError("MlpRegressor: target has " +
                           std::to_string(target.size()) +
                           " entries, expected " + std::to_string(c));
    }

    for (std::size_t j = 0; j < h; ++j) {
      double z = b1_[j];
      const double* wrow = &w1_[j * d];
      for (std::size_t i = 0; i < d; ++i) z += wrow[i] * x[i];
      pre[j] = z;
      hidden[j] = z > 0.0 ? z : 0.0;
    }
    double zmax = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < c; ++k) {
      double z = b2_[k];
      const double* wrow = &w2_[k * h];
      for (std::size_t j = 0; j < h; ++j) z += wrow[j] * hidden[j];
      probs[k] = z;
      zmax = std::max(zmax, z);
    }
    double total = 0.0;
    for (std::size_t k = 0; k < c; ++k) {
      probs[k] = std::exp(probs[k] - zmax);
      total += probs[k];
    }
    for (double& p : probs) p /= total;

    double weighted_ratio = 0.0;  // sum_c t_c * p_c/(p_c+eps)
    for (std::size_t k = 0; k < c; ++k) {
      loss += inv_batch * target[k] *
              (std::log(target[k] + kLogFloor) - std::log(probs[k] + kLogFloor));
      weighted_ratio += target[k] * probs[k] / (probs[k] + kLogFloor);
    }
    if (!grad_out) continue;

    for (std::size_t k = 0; k < c; ++k) {
      const double ratio = probs[k] / (probs[k] + kLogFloor);
      dlogits[k] = inv_batch * (probs[k] * weighted_ratio - target[k] * ratio);
    }
    for (std::size_t j = 0; j < h; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < c; ++k) acc += w2_[k * h + j] * dlogits[k];
      dhidden[j] = pre[j] > 0.0 ? acc : 0.0;
    }
    for (std::size_t k = 0; k < c; ++k) {
      const double g = dlogits[k];
      double* grow = &gw2[k * h];
      for (std::size_t j = 0; j < h; ++j) grow[j] += g * hidden[j];
      gb2[k] += g;
    }
    for (std::size_t j = 0; j < h; ++j) {
      const double g = dhidden[j];
      if (g == 0.0) continue;
      double* grow = &gw1[j * d];
      for (std::size_t i = 0; i < d; ++i) grow[i] += g * x[i];
      gb1[j] += g;
    }
  }
  if (loss_out) *loss_out = loss;
}

double MlpRegressor::batch_loss(const TrainingSet& data,
                                std::span<const std::size_t> idx) const {
  double loss = 0.0;
  step(data, idx, &loss, nullptr);
  return loss;
}

std::vector<double> MlpRegressor::batch_gradient(
    const TrainingSet& data, std::span<const std::size_t> idx) const {
  std::vector<double> grad;
  step(data, idx, nullptr, &grad);
  return grad;
}

double MlpRegressor::fit_epoch(const TrainingSet& data, const FitConfig& fit) {
  if (data.size() == 0) {
    throw DataError("fit_epoch: empty training set");
  }
  if (data.targets.size() != data.features.size()) {
    throw DimensionError("fit_epoch: features/targets size mismatch");
  }
  if (!(fit.learning_rate >= 0.0)) {
    throw ConfigError("fit_epoch: learning rate must be >= 0");
  }
  const std::size_t n = data.size();
  const std::size_t batch =
      std::max<std::size_t>(1, static_cast<std::size_t>(fit.batch_size));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(fit.shuffle_seed);
  rng.shuffle(order);

  double loss_sum = 0.0;
  std::vector<double> grad;
  int batch_index = 0;
  for (std::size_t start = 0; start < n; start += batch, ++batch_index) {
    const std::size_t count = std::min(batch, n - start);
    const std::span<const std::size_t> idx(order.data() + start, count);
    double loss = 0.0;
    step(data, idx, &loss, &grad);
    if (!std::isfinite(loss)) {
      throw TrainingDivergedError(fit.epoch_index, batch_index);
    }
    loss_sum += loss * static_cast<double>(count);
    const double lr = fit.learning_rate;
    double* params[] = {w1_.data(), b1_.data(), w2_.data(), b2_.data()};
    const std::size_t sizes[] = {w1_.size(), b1_.size(), w2_.size(), b2_.size()};
    std::size_t offset = 0;
    for (int part = 0; part < 4; ++part) {
      double* p = params[part];
      const double* g = grad.data() + offset;
      for (std::size_t i = 0; i < sizes[part]; ++i) p[i] -= lr * g[i];
      offset += sizes[part];
    }
  }
  ++epochs_trained_;
  return loss_sum / static_cast<double>(n);
}

std::unique_ptr<LdlModel> MlpRegressor::clone_initial(
    std::uint64_t seed) const {
  return std::make_unique<MlpRegressor>(input_dim_, hidden_dim_, class_count_,
                                        seed);
}

std::size_t MlpRegressor::parameter_count() const {
  return w1_.size() + b1_.size() + w2_.size() + b2_.size();
}

std::vector<double> MlpRegressor::parameters() const {
  std::vector<double> flat;
  flat.reserve(parameter_count());
  flat.insert(flat.end(), w1_.begin(), w1_.end());
  flat.insert(flat.end(), b1_.begin(), b1_.end());
  flat.insert(flat.end(), w2_.begin(), w2_.end());
  flat.insert(flat.end(), b2_.begin(), b2_.end());
  return flat;
}

void MlpRegressor::set_parameters(std::span<const double> flat) {
  if (flat.size() != parameter_count()) {
    throw DimensionError("set_parameters: expected " +
                         std::to_string(parameter_count()) + " values, got " +
                         std::to_string(flat.size()));
  }
  auto it = flat.begin();
  for (double& w : w1_) w = *it++;
  for (double& w : b1_) w = *it++;
  for (double& w : w2_) w = *it++;
  for (double& w : b2_) w = *it++;
}

nlohmann::ordered_json MlpRegressor::to_json() const {
  nlohmann::ordered_json j;
  j["format"] = kCheckpointFormat;
  j["input_dim"] = input_dim_;
  j["hidden_dim"] = hidden_dim_;
  j["class_count"] = class_count_;
  j["seed"] = init_seed_;
  j["epochs_trained"] = epochs_trained_;
  j["w1"] = w1_;
  j["b1"] = b1_;
  j["w2"] = w2_;
  j["b2"] = b2_;
  return j;
}

MlpRegressor MlpRegressor::from_json(const nlohmann::json& j) {
  if (!j.contains("format") || j.at("format") != kCheckpointFormat) {
    throw DataError("checkpoint: unknown or missing format tag");
  }
  MlpRegressor m(j.at("input_dim").get<int>(), j.at("hidden_dim").get<int>(),
                 j.at("class_count").get<int>(),
                 j.at("seed").get<std::uint64_t>());
  m.epochs_trained_ = j.at("epochs_trained").get<int>();
  const auto w1 = j.at("w1").get<std::vector<double>>();
  const auto b1 = j.at("b1").get<std::vector<double>>();
  const auto w2 = j.at("w2").get<std::vector<double>>();
  const auto b2 = j.at("b2").get<std::vector<double>>();
  if (w1.size() != m.w1_.size() || b1.size() != m.b1_.size() ||
      w2.size() != m.w2_.size() || b2.size() != m.b2_.size()) {
    throw DataError("checkpoint: weight shapes do not match declared dims");
  }
  m.w1_ = w1;
  m.b1_ = b1;
  m.w2_ = w2;
  m.b2_ = b2;
  return m;
}

PredictOutcome predict_rank(const LdlModel& model, std::span<const double> x) {
  const RankDistribution probs = model.forward(x);
  PredictOutcome out;
  out.y_hat = expected_rank(probs);
  double entropy = 0.0;
  for (std::size_t c = 0; c < probs.size(); ++c) {
    if (probs[c] > 0.0) entropy -= probs[c] * std::log(probs[c]);
  }
  const double max_entropy = std::log(static_cast<double>(probs.size()));
  out.gamma = std::clamp(1.0 - entropy / max_entropy, 0.0, 1.0);
  return out;
}

}  // namespace ordac
