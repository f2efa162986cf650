#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ordac/errors.hpp"
#include "ordac/pipeline.hpp"
#include "ordac/rng.hpp"

namespace fs = std::filesystem;

namespace {

struct Overrides {
  std::optional<std::string> method;
  std::optional<double> tau;
  std::optional<std::string> output_dir;
  std::optional<int> repeats;
  std::optional<int> max_epochs;
  std::optional<int> correction_start;
  std::optional<double> alpha_base;
  std::optional<double> beta_base;
  std::optional<double> std_init;
  std::optional<bool> debias;
  std::optional<double> test_fraction;
  std::optional<std::uint64_t> noise_seed;
  std::optional<std::uint64_t> fold_seed;
  std::optional<std::uint64_t> model_seed;
  std::optional<std::uint64_t> data_seed;
};

void add_override_flags(CLI::App* cmd, Overrides& ov) {
  cmd->add_option("--method", ov.method,
                  "baseline | ordac | ordac_c | ordac_r");
  cmd->add_option("--tau", ov.tau, "target noise rate in [0,1)");
  cmd->add_option("--out", ov.output_dir, "output directory");
  cmd->add_option("--repeats", ov.repeats, "seeded repetitions");
  cmd->add_option("--e-max", ov.max_epochs, "training epochs");
  cmd->add_option("--e-corr", ov.correction_start,
                  "first epoch with corrections");
  cmd->add_option("--alpha", ov.alpha_base, "sigma update base rate");
  cmd->add_option("--beta", ov.beta_base, "mu update base rate");
  cmd->add_option("--std-init", ov.std_init, "initial sigma");
  cmd->add_flag("--debias,!--no-debias", ov.debias,
                "class-wise prediction debiasing");
  cmd->add_option("--test-fraction", ov.test_fraction,
                  "held-out clean test fraction");
  cmd->add_option("--noise-seed", ov.noise_seed, "noise seed");
  cmd->add_option("--fold-seed", ov.fold_seed, "fold/split seed");
  cmd->add_option("--model-seed", ov.model_seed, "model init seed");
  cmd->add_option("--data-seed", ov.data_seed, "synthetic data seed");
}

void apply_overrides(ordac::ExperimentConfig& cfg, const Overrides& ov) {
  if (ov.method) cfg.method = ordac::method_from_string(*ov.method);
  if (ov.tau) cfg.noise.tau = *ov.tau;
  if (ov.output_dir) cfg.output_dir = *ov.output_dir;
  if (ov.repeats) cfg.repeats = *ov.repeats;
  if (ov.max_epochs) cfg.correction.max_epochs = *ov.max_epochs;
  if (ov.correction_start) cfg.correction.correction_start = *ov.correction_start;
  if (ov.alpha_base) cfg.correction.alpha_base = *ov.alpha_base;
  if (ov.beta_base) cfg.correction.beta_base = *ov.beta_base;
  if (ov.std_init) cfg.correction.std_init = *ov.std_init;
  if (ov.debias) cfg.correction.debias = *ov.debias;
  if (ov.test_fraction) cfg.test_fraction = *ov.test_fraction;
  if (ov.noise_seed) cfg.noise.seed = *ov.noise_seed;
  if (ov.fold_seed) cfg.folds.seed = *ov.fold_seed;
  if (ov.model_seed) cfg.model.seed = *ov.model_seed;
  if (ov.data_seed && cfg.dataset.synthetic) {
    cfg.dataset.synthetic->seed = *ov.data_seed;
  }
}

std::string output_root() {
  const char* env = std::getenv("ORDAC_OUTPUT_ROOT");
  return env && *env ? env : "runs";
}

std::string default_run_dir(const ordac::ExperimentConfig& cfg) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%s_tau%.2f_seed%llu",
                ordac::to_string(cfg.method).c_str(), cfg.noise.tau,
                static_cast<unsigned long long>(cfg.model.seed));
  return (fs::path(output_root()) / buf).string();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ORDAC: adaptive correction of noisy ordinal labels"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides ov;

  auto* gen = app.add_subcommand("generate", "write the synthetic dataset CSV");
  std::string gen_out;
  gen->add_option("--config", config_path, "config file")->required();
  gen->add_option("--out", gen_out, "output CSV path");

  auto* inject = app.add_subcommand("inject", "noise a clean dataset CSV");
  std::string inject_in, inject_out;
  inject->add_option("--config", config_path, "config file")->required();
  inject->add_option("--in", inject_in, "clean dataset CSV")->required();
  inject->add_option("--out", inject_out, "noisy CSV path");
  inject->add_option("--tau", ov.tau, "target noise rate in [0,1)");
  inject->add_option("--noise-seed", ov.noise_seed, "noise seed");

  auto* run = app.add_subcommand("run", "execute the configured method");
  run->add_option("--config", config_path, "config file")->required();
  add_override_flags(run, ov);

  auto* evaluate = app.add_subcommand("evaluate",
                                      "score checkpoint(s) on a clean CSV");
  std::vector<std::string> eval_models;
  std::string eval_data, eval_out;
  evaluate->add_option("--model", eval_models, "checkpoint JSON (repeatable)")
      ->required();
  evaluate->add_option("--data", eval_data, "clean test CSV")->required();
  evaluate->add_option("--out", eval_out, "report JSON path");

  auto* report = app.add_subcommand("report", "aggregate runs into one table");
  std::vector<std::string> report_dirs;
  std::string report_out;
  report->add_option("--run", report_dirs, "run directory (repeatable)")
      ->required();
  report->add_option("--out", report_out, "output CSV path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      ordac::ExperimentConfig cfg = ordac::ExperimentConfig::load(config_path);
      if (gen_out.empty()) {
        gen_out = (fs::path(cfg.output_dir.empty() ? output_root()
                                                   : cfg.output_dir) /
                   "dataset.csv")
                      .string();
      }
      ordac::cmd_generate(cfg, gen_out);
      std::cout << "wrote " << gen_out << "\n";
    } else if (inject->parsed()) {
      ordac::ExperimentConfig cfg = ordac::ExperimentConfig::load(config_path);
      if (ov.tau) cfg.noise.tau = *ov.tau;
      if (ov.noise_seed) cfg.noise.seed = *ov.noise_seed;
      if (inject_out.empty()) {
        fs::path p(inject_in);
        inject_out = (p.parent_path() / (p.stem().string() + "_noisy.csv"))
                         .string();
      }
      const std::string summary_path =
          fs::path(inject_out).replace_extension(".summary.json").string();
      const auto summary =
          ordac::cmd_inject(cfg, inject_in, inject_out, summary_path);
      std::cout << "wrote " << inject_out << "\n"
                << "realized noise rate: "
                << summary.at("realized_rate").get<double>() << " (target "
                << cfg.noise.tau << ")\n";
    } else if (run->parsed()) {
      ordac::ExperimentConfig cfg = ordac::ExperimentConfig::load(config_path);
      apply_overrides(cfg, ov);
      if (cfg.output_dir.empty()) cfg.output_dir = default_run_dir(cfg);
      const std::vector<ordac::RunOutcome> outcomes = ordac::run_all(cfg);
      for (const ordac::RunOutcome& o : outcomes) {
        std::printf("%-8s tau=%.2f  macro_mae=%.4f  macro_recall=%.4f  -> %s\n",
                    ordac::to_string(o.method).c_str(), o.tau,
                    o.report.macro_mae, o.report.macro_recall,
                    o.dir.string().c_str());
      }
      if (outcomes.size() > 1) {
        std::cout << "summary: " << (fs::path(cfg.output_dir) / "summary.json")
                  << "\n";
      }
    } else if (evaluate->parsed()) {
      const ordac::EvalReport rep =
          ordac::cmd_evaluate(eval_models, eval_data, eval_out);
      std::printf("macro_mae=%.4f  macro_recall=%.4f\n", rep.macro_mae,
                  rep.macro_recall);
      if (!eval_out.empty()) std::cout << "wrote " << eval_out << "\n";
    } else if (report->parsed()) {
      const auto rows = ordac::aggregate_runs(report_dirs);
      std::cout << ordac::render_table(rows);
      if (report_out.empty()) report_out = "report_table.csv";
      ordac::write_aggregate_csv(rows, report_out);
      std::cout << "wrote " << report_out << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
