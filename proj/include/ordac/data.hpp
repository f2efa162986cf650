#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ordac/sample.hpp"

namespace ordac {

// A labeled pool. Sample ids are unique and dense 0..N-1, and every sample
// shares the same feature dimension.
struct Dataset {
  std::vector<Sample> samples;
  int class_count = 0;
  int feature_dim = 0;
  std::string provenance;  // generator params or source path; diagnostics only

  std::size_t size() const { return samples.size(); }
};

// Ordinal benchmark generator: class centers sit on a line so rank distance
// equals feature distance and adjacent classes are genuinely confusable.
struct SyntheticSpec {
  int class_count = 5;
  int feature_dim = 4;
  int n_per_class = 200;
  std::vector<int> per_class;  // when non-empty, overrides n_per_class
  double separation = 2.0;     // distance between adjacent class centers
  double spread = 1.0;         // within-class standard deviation
  std::uint64_t seed = 1;
};

// Class c is an isotropic Gaussian centered at (c * separation) * u for a
// fixed unit direction u; label_true = label_original = c. Deterministic
// per seed; class counts are exact, not sampled.
Dataset generate_synthetic(const SyntheticSpec& spec);

// CSV schema: optional `id`, feature columns in header order, `label` (alias
// `label_noisy`), optional `label_true`. With class_count_hint = 0 the rank
// count is inferred as 1 + max observed label. Noisy pools are written with
// the `label_noisy` column name; the loader treats both spellings alike.
Dataset load_csv(const std::string& path, int class_count_hint = 0);
void write_csv(const Dataset& ds, const std::string& path,
               const std::string& label_column = "label");

// Corrected-pool export: id, features, mu, sigma, label_original, label_true.
void write_corrected_csv(const Dataset& ds, const std::string& path);
Dataset load_corrected_csv(const std::string& path, int class_count_hint = 0);

// Stratified K-fold assignment over label_original; per-class fold counts
// differ by at most one. Deterministic per seed.
FoldPlan split_folds(const Dataset& ds, int fold_count, std::uint64_t seed);

// Stratified holdout; returns (rest_ids, held_out_ids), each sorted.
std::pair<std::vector<int>, std::vector<int>> stratified_split(
    const Dataset& ds, double held_out_fraction, std::uint64_t seed);

// New dataset from a subset of ids, re-indexed densely in the given order.
Dataset subset(const Dataset& ds, std::span<const int> ids);

// Re-arms every label distribution at (label_original, std_init).
void reset_distributions(Dataset& ds, double std_init);

// Field-for-field equality of the persisted fields (ids, features, labels);
// provenance is ignored.
bool datasets_equal(const Dataset& a, const Dataset& b);

}  // namespace ordac
