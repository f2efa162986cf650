#include "ordac/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "ordac/errors.hpp"
#include "ordac/label_dist.hpp"

namespace ordac {

namespace {

void check_inputs(std::span<const double> preds, std::span<const int> truths,
                  int class_count) {
  if (preds.empty()) throw DataError("metrics: empty input");
  if (preds.size() != truths.size()) {
    throw DimensionError("metrics: " + std::to_string(preds.size()) +
                         " predictions vs " + std::to_string(truths.size()) +
                         " truths");
  }
  for (const int t : truths) {
    if (t < 0 || t >= class_count) {
      throw DataError("metrics: true rank " + std::to_string(t) +
                      " outside 0.." + std::to_string(class_count - 1));
    }
  }
}

}  // namespace

EvalReport evaluate_ranks(std::span<const double> pred_ranks,
                          std::span<const int> true_ranks, int class_count) {
  check_inputs(pred_ranks, true_ranks, class_count);
  const std::size_t C = static_cast<std::size_t>(class_count);

  EvalReport report;
  report.n_per_class.assign(C, 0);
  std::vector<double> abs_err(C, 0.0);
  std::vector<int> hits(C, 0);
  for (std::size_t i = 0; i < pred_ranks.size(); ++i) {
    const int truth = true_ranks[i];
    const int predicted = class_of(pred_ranks[i], class_count);
    const std::size_t c = static_cast<std::size_t>(truth);
    ++report.n_per_class[c];
    abs_err[c] += std::abs(predicted - truth);
    if (predicted == truth) ++hits[c];
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  report.per_class_mae.assign(C, nan);
  report.per_class_recall.assign(C, nan);
  double mae_sum = 0.0, rec_sum = 0.0;
  int present = 0;
  for (std::size_t c = 0; c < C; ++c) {
    if (report.n_per_class[c] == 0) continue;
    const double n = report.n_per_class[c];
    report.per_class_mae[c] = abs_err[c] / n;
    report.per_class_recall[c] = hits[c] / n;
    mae_sum += report.per_class_mae[c];
    rec_sum += report.per_class_recall[c];
    ++present;
  }
  report.macro_mae = mae_sum / present;
  report.macro_recall = rec_sum / present;
  return report;
}

double macro_mae(std::span<const double> pred_ranks,
                 std::span<const int> true_ranks, int class_count) {
  return evaluate_ranks(pred_ranks, true_ranks, class_count).macro_mae;
}

double macro_recall(std::span<const double> pred_ranks,
                    std::span<const int> true_ranks, int class_count) {
  return evaluate_ranks(pred_ranks, true_ranks, class_count).macro_recall;
}

std::pair<double, double> label_quality(std::span<const double> mus,
                                        std::span<const int> true_ranks) {
  if (mus.empty()) throw DataError("label_quality: empty input");
  if (mus.size() != true_ranks.size()) {
    throw DimensionError("label_quality: size mismatch");
  }
  double abs_sum = 0.0, sq_sum = 0.0;
  for (std::size_t i = 0; i < mus.size(); ++i) {
    const double e = mus[i] - static_cast<double>(true_ranks[i]);
    abs_sum += std::abs(e);
    sq_sum += e * e;
  }
  const double n = static_cast<double>(mus.size());
  return {abs_sum / n, std::sqrt(sq_sum / n)};
}

nlohmann::ordered_json EvalReport::to_json() const {
  nlohmann::ordered_json j;
  j["macro_mae"] = macro_mae;
  j["macro_recall"] = macro_recall;
  auto nullable = [](const std::vector<double>& v) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const double x : v) {
      if (std::isnan(x)) {
        arr.push_back(nullptr);
      } else {
        arr.push_back(x);
      }
    }
    return arr;
  };
  j["per_class_mae"] = nullable(per_class_mae);
  j["per_class_recall"] = nullable(per_class_recall);
  j["n_per_class"] = n_per_class;
  return j;
}

EvalReport EvalReport::from_json(const nlohmann::json& j) {
  EvalReport r;
  r.macro_mae = j.at("macro_mae").get<double>();
  r.macro_recall = j.at("macro_recall").get<double>();
  auto denull = [](const nlohmann::json& arr) {
    std::vector<double> v;
    for (const auto& x : arr) {
      v.push_back(x.is_null() ? std::numeric_limits<double>::quiet_NaN()
                              : x.get<double>());
    }
    return v;
  };
  r.per_class_mae = denull(j.at("per_class_mae"));
  r.per_class_recall = denull(j.at("per_class_recall"));
  r.n_per_class = j.at("n_per_class").get<std::vector<int>>();
  return r;
}

std::string EvalReport::csv_row() const {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g,%.17g", macro_mae, macro_recall);
  return buf;
}

}  // namespace ordac
