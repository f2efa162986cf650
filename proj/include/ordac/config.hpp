#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "ordac/correction.hpp"
#include "ordac/data.hpp"

namespace ordac {

enum class Method { kBaseline, kOrdac, kOrdacC, kOrdacR };

std::string to_string(Method method);
Method method_from_string(const std::string& name);  // throws ConfigError

struct DatasetConfig {
  std::optional<SyntheticSpec> synthetic;
  std::optional<std::string> csv_path;
  int class_count = 0;  // optional hint when loading CSV
};

struct NoiseConfig {
  double tau = 0.0;
  double sigma_n = 3.0;
  std::uint64_t seed = 99;
};

struct ModelConfig {
  int hidden = 64;
  double learning_rate = 0.05;
  int batch_size = 32;
  std::uint64_t seed = 11;
};

struct FoldConfig {
  int count = 5;
  std::uint64_t seed = 3;
};

// Everything one run needs; serialized to/from the JSON config file. Every
// random draw in a run traces back to the seeds recorded here.
struct ExperimentConfig {
  DatasetConfig dataset;
  NoiseConfig noise;
  Method method = Method::kOrdac;
  CorrectionParams correction;
  ModelConfig model;
  FoldConfig folds;
  double test_fraction = 0.2;
  std::string output_dir;
  int repeats = 1;

  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig load(const std::string& path);
  nlohmann::ordered_json to_json() const;
  void validate() const;  // throws ConfigError

  // Copy with all seeds re-derived for repeat index r (r = 0 keeps the
  // original seeds) and repeats reset to 1.
  ExperimentConfig for_repeat(int r) const;
};

}  // namespace ordac
