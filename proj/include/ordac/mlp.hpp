#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ordac/model.hpp"

namespace ordac {

// Reference regressor: d -> hidden (rectifier) -> C (softmax), trained with
// mini-batch gradient descent on the KL loss against target distributions.
class MlpRegressor final : public LdlModel {
 public:
  MlpRegressor(int input_dim, int hidden_dim, int class_count,
               std::uint64_t seed);

  int input_dim() const override { return input_dim_; }
  int class_count() const override { return class_count_; }
  int hidden_dim() const { return hidden_dim_; }
  std::uint64_t init_seed() const { return init_seed_; }
  int epochs_trained() const { return epochs_trained_; }

  RankDistribution forward(std::span<const double> x) const override;
  double fit_epoch(const TrainingSet& data, const FitConfig& fit) override;
  std::unique_ptr<LdlModel> clone_initial(std::uint64_t seed) const override;

  // Mean loss / loss gradient over the rows selected by idx. The gradient is
  // the exact derivative of the floored-log loss that fit_epoch minimizes,
  // exposed for finite-difference verification.
  double batch_loss(const TrainingSet& data,
                    std::span<const std::size_t> idx) const;
  std::vector<double> batch_gradient(const TrainingSet& data,
                                     std::span<const std::size_t> idx) const;

  // Flat parameter vector, layout w1 | b1 | w2 | b2 (row-major matrices).
  std::vector<double> parameters() const;
  void set_parameters(std::span<const double> flat);
  std::size_t parameter_count() const;

  // Self-describing checkpoint with layer shapes, seed and epoch count.
  nlohmann::ordered_json to_json() const;
  static MlpRegressor from_json(const nlohmann::json& j);

 private:
  struct Flow;  // forward activations + gradient accumulators

  void step(const TrainingSet& data, std::span<const std::size_t> idx,
            double* loss_out, std::vector<double>* grad_out) const;

  int input_dim_;
  int hidden_dim_;
  int class_count_;
  std::uint64_t init_seed_;
  int epochs_trained_ = 0;

  std::vector<double> w1_;  // hidden x input, row-major
  std::vector<double> b1_;  // hidden
  std::vector<double> w2_;  // classes x hidden, row-major
  std::vector<double> b2_;  // classes
};

}  // namespace ordac
