#pragma once

#include <optional>
#include <vector>

#include "ordac/label_dist.hpp"

namespace ordac {

inline constexpr double kDefaultStdInit = 0.75;

// One training instance. dist is the working label distribution and is the
// only field the correction engine mutates; label_original and label_true
// are immutable provenance (label_true is hidden from training and exists
// for evaluation only).
struct Sample {
  int id = 0;
  std::vector<double> features;
  LabelDistribution dist;
  int label_original = 0;
  std::optional<int> label_true;
};

inline Sample make_sample(int id, std::vector<double> features,
                          int label_original, std::optional<int> label_true,
                          double std_init = kDefaultStdInit) {
  Sample s;
  s.id = id;
  s.features = std::move(features);
  s.label_original = label_original;
  s.label_true = label_true;
  s.dist = LabelDistribution{static_cast<double>(label_original), std_init};
  return s;
}

// K-fold assignment over dense sample ids. Folds partition the ids: sample i
// is validated by fold assignment[i] and trained on by the other K-1.
struct FoldPlan {
  int fold_count = 0;
  std::vector<int> assignment;  // sample id -> fold index

  std::vector<int> valid_ids(int fold) const {
    std::vector<int> ids;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
      if (assignment[i] == fold) ids.push_back(static_cast<int>(i));
    }
    return ids;
  }

  std::vector<int> train_ids(int fold) const {
    std::vector<int> ids;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
      if (assignment[i] != fold) ids.push_back(static_cast<int>(i));
    }
    return ids;
  }
};

}  // namespace ordac
