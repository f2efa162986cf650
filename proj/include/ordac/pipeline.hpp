#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "ordac/config.hpp"
#include "ordac/metrics.hpp"
#include "ordac/model.hpp"

namespace ordac {

struct RunOutcome {
  std::filesystem::path dir;
  Method method = Method::kOrdac;
  double tau = 0.0;
  EvalReport report;
  double realized_noise_rate = 0.0;
  double label_mae_noisy = 0.0;      // pool labels vs truth before correction
  double label_mae_corrected = 0.0;  // pool mu vs truth after the run
  std::vector<int> removed_ids;      // ordac_r only
};

// Executes one seeded run end-to-end: materialize the dataset, hold out a
// clean stratified test split, inject noise into the training pool, run the
// configured method, evaluate, and write all artifacts into cfg.output_dir.
// Fails (throws) unless every artifact was written and validates on reload.
RunOutcome run_experiment(const ExperimentConfig& cfg);

// Honors cfg.repeats with derived per-repeat seeds (run_000, run_001, ...)
// and writes a mean +/- std summary when repeats > 1. Rejects seed
// collisions across the declared runs.
std::vector<RunOutcome> run_all(const ExperimentConfig& cfg);

// Mean predicted distribution across models, then expectation readout.
// Truth comes from label_true when present, label_original otherwise.
EvalReport evaluate_ensemble(std::span<const LdlModel* const> models,
                             const Dataset& test);

// `generate`: materialize the configured synthetic dataset as CSV.
void cmd_generate(const ExperimentConfig& cfg, const std::string& out_path);

// `inject`: noise a clean dataset CSV; writes the noisy CSV (label column =
// noisy label, label_true = input label) and returns the realized-rate
// summary that is also written next to it.
nlohmann::ordered_json cmd_inject(const ExperimentConfig& cfg,
                                  const std::string& in_path,
                                  const std::string& out_path,
                                  const std::string& summary_path);

// `evaluate`: score checkpoint(s) on a clean CSV; writes an EvalReport.
EvalReport cmd_evaluate(const std::vector<std::string>& model_paths,
                        const std::string& data_path,
                        const std::string& out_path);

// `report`: aggregate run directories into a method x tau table.
struct AggregateRow {
  std::string method;
  double tau = 0.0;
  int runs = 0;
  double mae_mean = 0.0, mae_std = 0.0;
  double rec_mean = 0.0, rec_std = 0.0;
};

std::vector<AggregateRow> aggregate_runs(
    const std::vector<std::string>& run_dirs);
std::string render_table(const std::vector<AggregateRow>& rows);
void write_aggregate_csv(const std::vector<AggregateRow>& rows,
                         const std::string& path);

// Content hash used in run manifests (FNV-1a 64, hex).
std::string fnv1a64_hex(const std::string& bytes);

}  // namespace ordac
