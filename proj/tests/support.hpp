#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <vector>

#include "ordac/label_dist.hpp"
#include "ordac/mlp.hpp"
#include "ordac/model.hpp"
#include "ordac/rng.hpp"

namespace ordac::testing {

// Independent scalar re-evaluation of the Gaussian rank discretization,
// kept deliberately naive (long double, no max-shift) so it shares no code
// path with the library.
inline std::vector<double> oracle_discretize(double mu, double sigma, int C) {
  std::vector<long double> w(static_cast<std::size_t>(C));
  long double total = 0.0L;
  for (int c = 0; c < C; ++c) {
    const long double d = static_cast<long double>(c) - mu;
    w[static_cast<std::size_t>(c)] =
        std::exp(static_cast<long double>(-d * d / (2.0L * sigma * sigma)));
    total += w[static_cast<std::size_t>(c)];
  }
  std::vector<double> probs(w.size());
  for (std::size_t c = 0; c < w.size(); ++c) {
    probs[c] = static_cast<double>(w[c] / total);
  }
  return probs;
}

inline double oracle_kl(const std::vector<double>& t,
                        const std::vector<double>& p) {
  long double acc = 0.0L;
  for (std::size_t c = 0; c < t.size(); ++c) {
    acc += static_cast<long double>(t[c]) *
           (std::log(static_cast<long double>(t[c]) + 1e-12L) -
            std::log(static_cast<long double>(p[c]) + 1e-12L));
  }
  return static_cast<double>(acc);
}

inline double oracle_gamma(const std::vector<double>& p) {
  long double h = 0.0L;
  for (const double x : p) {
    if (x > 0.0) h -= static_cast<long double>(x) * std::log(static_cast<long double>(x));
  }
  return static_cast<double>(1.0L -
                             h / std::log(static_cast<long double>(p.size())));
}

// Model stub that replays a fixed table of distributions, keyed by the
// integer in feature[0]. Used to drive the correction path with hand-picked
// predictions.
class FixedModel final : public LdlModel {
 public:
  FixedModel(int input_dim, std::vector<RankDistribution> table)
      : input_dim_(input_dim), table_(std::move(table)) {}

  int input_dim() const override { return input_dim_; }
  int class_count() const override {
    return static_cast<int>(table_.front().size());
  }
  RankDistribution forward(std::span<const double> x) const override {
    return table_.at(static_cast<std::size_t>(x[0]));
  }
  double fit_epoch(const TrainingSet&, const FitConfig&) override { return 0.0; }
  std::unique_ptr<LdlModel> clone_initial(std::uint64_t) const override {
    return std::make_unique<FixedModel>(input_dim_, table_);
  }

 private:
  int input_dim_;
  std::vector<RankDistribution> table_;
};

// Records which sample ids (read from feature[0]) each cloned instance
// trained on and predicted for. Clones share one sink; fold workers run
// concurrently, so recording is mutex-guarded.
class SpyModel final : public LdlModel {
 public:
  struct Sink {
    std::mutex mutex;
    std::map<std::uint64_t, std::set<int>> trained;    // by instance seed
    std::map<std::uint64_t, std::set<int>> predicted;
  };

  SpyModel(int input_dim, int class_count, std::uint64_t seed,
           std::shared_ptr<Sink> sink)
      : input_dim_(input_dim),
        class_count_(class_count),
        seed_(seed),
        sink_(std::move(sink)) {}

  int input_dim() const override { return input_dim_; }
  int class_count() const override { return class_count_; }

  RankDistribution forward(std::span<const double> x) const override {
    {
      std::lock_guard<std::mutex> lock(sink_->mutex);
      sink_->predicted[seed_].insert(static_cast<int>(x[0]));
    }
    // Slightly peaked output keeps gamma > 0 so corrections engage.
    std::vector<double> p(static_cast<std::size_t>(class_count_),
                          0.5 / (class_count_ - 1));
    p[0] = 0.5;
    return RankDistribution(std::move(p));
  }

  double fit_epoch(const TrainingSet& data, const FitConfig&) override {
    std::lock_guard<std::mutex> lock(sink_->mutex);
    for (const auto& x : data.features) {
      sink_->trained[seed_].insert(static_cast<int>(x[0]));
    }
    return 0.0;
  }

  std::unique_ptr<LdlModel> clone_initial(std::uint64_t seed) const override {
    return std::make_unique<SpyModel>(input_dim_, class_count_, seed, sink_);
  }

 private:
  int input_dim_;
  int class_count_;
  std::uint64_t seed_;
  std::shared_ptr<Sink> sink_;
};

// Worst relative disagreement between the analytic batch gradient and
// central finite differences of the batch loss.
inline double max_gradient_mismatch(MlpRegressor& model,
                                    const TrainingSet& data,
                                    std::span<const std::size_t> idx,
                                    double step = 1e-5) {
  const std::vector<double> analytic = model.batch_gradient(data, idx);
  std::vector<double> params = model.parameters();
  double worst = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double original = params[i];
    params[i] = original + step;
    model.set_parameters(params);
    const double up = model.batch_loss(data, idx);
    params[i] = original - step;
    model.set_parameters(params);
    const double down = model.batch_loss(data, idx);
    params[i] = original;
    model.set_parameters(params);
    const double numeric = (up - down) / (2.0 * step);
    const double denom =
        std::max({std::abs(analytic[i]), std::abs(numeric), 1e-3});
    worst = std::max(worst, std::abs(analytic[i] - numeric) / denom);
  }
  return worst;
}

// TrainingSet whose feature storage lives alongside the spans. Moving the
// struct keeps the heap buffers (and thus the spans) valid.
struct OwnedData {
  std::vector<std::vector<double>> rows;
  TrainingSet ts;

  void rebuild_spans() {
    ts.features.clear();
    for (const auto& r : rows) ts.features.emplace_back(r);
  }
};

inline OwnedData random_batch(Rng& rng, int n, int d, int C,
                              bool unimodal_targets = false) {
  OwnedData od;
  od.rows.resize(static_cast<std::size_t>(n));
  for (auto& row : od.rows) {
    row.resize(static_cast<std::size_t>(d));
    for (double& x : row) x = rng.next_gaussian();
  }
  for (int i = 0; i < n; ++i) {
    std::vector<double> t(static_cast<std::size_t>(C));
    double total = 0.0;
    for (double& x : t) {
      x = rng.next_double() + 1e-3;
      total += x;
    }
    for (double& x : t) x /= total;
    od.ts.targets.push_back(RankDistribution(std::move(t)));
  }
  if (unimodal_targets) {
    od.ts.targets.clear();
    for (int i = 0; i < n; ++i) {
      LabelDistribution ld{rng.next_double() * (C - 1),
                           0.3 + rng.next_double()};
      od.ts.targets.push_back(discretize(ld, C));
    }
  }
  od.rebuild_spans();
  return od;
}

}  // namespace ordac::testing
