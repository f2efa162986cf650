#pragma once

#include <stdexcept>
#include <string>

namespace ordac {

// Invalid configuration values (rank count < 2, tau out of range, ...).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed or out-of-range data (CSV rows, labels).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Mismatched vector / matrix dimensions.
struct DimensionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Non-finite loss encountered while fitting.
struct TrainingDivergedError : std::runtime_error {
  TrainingDivergedError(int epoch_, int batch_)
      : std::runtime_error("training diverged: non-finite loss at epoch " +
                           std::to_string(epoch_) + ", batch " +
                           std::to_string(batch_)),
        epoch(epoch_),
        batch(batch_) {}

  int epoch;
  int batch;
};

}  // namespace ordac
