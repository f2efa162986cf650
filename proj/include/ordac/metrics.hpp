#pragma once

#include <span>
#include <utility>
#include <vector>

#include <json.hpp>

namespace ordac {

// Macro-averaged scores grouped by true label; absent classes carry NaN in
// the per-class vectors and are excluded from the macro means.
struct EvalReport {
  double macro_mae = 0.0;
  double macro_recall = 0.0;
  std::vector<double> per_class_mae;
  std::vector<double> per_class_recall;
  std::vector<int> n_per_class;

  nlohmann::ordered_json to_json() const;
  static EvalReport from_json(const nlohmann::json& j);
  std::string csv_row() const;  // flat row for cross-run aggregation
};

// Per true class c: mean |class_of(pred) - c|, averaged over present classes.
// Throws DataError on empty or mismatched input.
double macro_mae(std::span<const double> pred_ranks,
                 std::span<const int> true_ranks, int class_count);

// Per true class c: fraction with class_of(pred) == c, averaged over present
// classes.
double macro_recall(std::span<const double> pred_ranks,
                    std::span<const int> true_ranks, int class_count);

// Micro (mae, rmse) between continuous rank values and true ranks; measures
// the labels themselves rather than a classifier.
std::pair<double, double> label_quality(std::span<const double> mus,
                                        std::span<const int> true_ranks);

// Full report with per-class breakdowns.
EvalReport evaluate_ranks(std::span<const double> pred_ranks,
                          std::span<const int> true_ranks, int class_count);

}  // namespace ordac
