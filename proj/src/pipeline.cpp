#include "ordac/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "ordac/errors.hpp"
#include "ordac/mlp.hpp"
#include "ordac/noise.hpp"
#include "ordac/rng.hpp"

namespace fs = std::filesystem;

namespace ordac {

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  out << content;
  if (!out) throw DataError("write failed: " + path.string());
}

void write_json(const fs::path& path, const nlohmann::ordered_json& j) {
  write_file(path, j.dump(2) + "\n");
}

nlohmann::json parse_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError("JSON parse error in " + path.string() + ": " + e.what());
  }
  return j;
}

std::vector<int> pool_labels(const Dataset& ds) {
  std::vector<int> labels(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    labels[i] = ds.samples[i].label_original;
  }
  return labels;
}

std::vector<int> pool_truths(const Dataset& ds) {
  std::vector<int> truths(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const Sample& s = ds.samples[i];
    truths[i] = s.label_true.value_or(s.label_original);
  }
  return truths;
}

nlohmann::ordered_json history_to_json(const std::vector<EpochStats>& epochs) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const EpochStats& e : epochs) {
    nlohmann::ordered_json j;
    j["epoch"] = e.epoch;
    j["mean_train_loss"] = e.mean_train_loss;
    j["mean_abs_mu_delta"] = e.mean_abs_mu_delta;
    j["mean_sigma"] = e.mean_sigma;
    j["corrected"] = e.corrected_count;
    j["class_counts"] = e.class_counts;
    arr.push_back(std::move(j));
  }
  return arr;
}

std::string format_tau(double tau) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", tau);
  return buf;
}

}  // namespace

std::string fnv1a64_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

EvalReport evaluate_ensemble(std::span<const LdlModel* const> models,
                             const Dataset& test) {
  if (models.empty()) throw ConfigError("evaluate: no models given");
  const int C = models[0]->class_count();
  for (const LdlModel* m : models) {
    if (m->class_count() != C || m->input_dim() != test.feature_dim) {
      throw DimensionError(
          "evaluate: model shapes disagree with each other or the data");
    }
  }
  std::vector<double> y_hat(test.size());
  for (std::size_t i = 0; i < test.size(); ++i) {
    std::vector<double> mean_probs(static_cast<std::size_t>(C), 0.0);
    for (const LdlModel* m : models) {
      const RankDistribution p = m->forward(test.samples[i].features);
      for (std::size_t c = 0; c < mean_probs.size(); ++c) {
        mean_probs[c] += p[c];
      }
    }
    for (double& p : mean_probs) p /= static_cast<double>(models.size());
    y_hat[i] = expected_rank(RankDistribution(std::move(mean_probs)));
  }
  return evaluate_ranks(y_hat, pool_truths(test), C);
}

RunOutcome run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.output_dir.empty()) {
    throw ConfigError("run: output_dir is required");
  }
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);

  // Materialize the dataset and hold out a clean, stratified test split
  // before any noise touches the labels.
  Dataset full = cfg.dataset.synthetic
                     ? generate_synthetic(*cfg.dataset.synthetic)
                     : load_csv(*cfg.dataset.csv_path, cfg.dataset.class_count);
  for (Sample& s : full.samples) {
    if (!s.label_true) s.label_true = s.label_original;
  }
  const auto [train_ids, test_ids] = stratified_split(
      full, cfg.test_fraction,
      derive_seed(cfg.folds.seed, seed_stream::kTestSplit));
  if (train_ids.empty() || test_ids.empty()) {
    throw ConfigError("run: test split produced an empty side");
  }
  Dataset pool = subset(full, train_ids);
  const Dataset test = subset(full, test_ids);

  RunOutcome outcome;
  outcome.dir = dir;
  outcome.method = cfg.method;
  outcome.tau = cfg.noise.tau;

  if (cfg.noise.tau > 0.0) {
    const NoiseMatrix matrix = build_noise_matrix(
        pool.class_count, cfg.noise.tau, cfg.noise.sigma_n);
    const std::vector<int> clean = pool_labels(pool);
    const std::vector<int> noisy = inject_noise(clean, matrix, cfg.noise.seed);
    int flipped = 0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (noisy[i] != clean[i]) ++flipped;
      pool.samples[i].label_original = noisy[i];
    }
    outcome.realized_noise_rate =
        static_cast<double>(flipped) / static_cast<double>(pool.size());
  }
  reset_distributions(pool, cfg.correction.std_init);

  {
    const std::vector<int> truths = pool_truths(pool);
    std::vector<double> as_mu(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
      as_mu[i] = static_cast<double>(pool.samples[i].label_original);
    }
    outcome.label_mae_noisy = label_quality(as_mu, truths).first;
  }

  write_csv(pool, (dir / "train_noisy.csv").string());
  write_csv(test, (dir / "test.csv").string());

  const MlpRegressor prototype(pool.feature_dim, cfg.model.hidden,
                               pool.class_count, cfg.model.seed);
  const SgdOptions sgd{cfg.model.learning_rate, cfg.model.batch_size};

  std::vector<std::unique_ptr<LdlModel>> final_models;
  nlohmann::ordered_json history;
  Dataset retrain_pool;  // ordac_r trains on the filtered pool

  if (cfg.method == Method::kBaseline) {
    std::vector<double> losses;
    final_models.push_back(train_on_corrected(pool, cfg.correction, prototype,
                                              sgd, cfg.model.seed, &losses));
    history["retrain_losses"] = losses;
  } else {
    const FoldPlan plan = split_folds(pool, cfg.folds.count, cfg.folds.seed);
    std::vector<std::uint64_t> seeds(static_cast<std::size_t>(cfg.folds.count));
    for (std::size_t k = 0; k < seeds.size(); ++k) {
      seeds[k] = derive_seed(cfg.model.seed, seed_stream::kFoldModel, k);
    }
    TrainResult trained =
        ordac_train(pool, plan, cfg.correction, prototype, sgd, seeds);
    history["epochs"] = history_to_json(trained.history);

    if (cfg.method == Method::kOrdac) {
      final_models = std::move(trained.models);
    } else {
      const Dataset* train_target = &pool;
      if (cfg.method == Method::kOrdacR) {
        FilterResult filtered =
            filter_uncertain(pool, cfg.correction.std_init);
        outcome.removed_ids = filtered.removed_ids;
        retrain_pool = std::move(filtered.kept);
        train_target = &retrain_pool;
        if (retrain_pool.size() == 0) {
          throw DataError("ordac_r: filter removed every sample");
        }
      }
      std::vector<double> losses;
      final_models.push_back(train_on_corrected(
          *train_target, cfg.correction, prototype, sgd,
          derive_seed(cfg.model.seed, seed_stream::kRetrain), &losses));
      history["retrain_losses"] = losses;
    }
  }

  {
    const std::vector<int> truths = pool_truths(pool);
    std::vector<double> mus(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
      mus[i] = pool.samples[i].dist.mu;
    }
    outcome.label_mae_corrected = label_quality(mus, truths).first;
  }

  std::vector<const LdlModel*> model_ptrs;
  for (const auto& m : final_models) model_ptrs.push_back(m.get());
  outcome.report = evaluate_ensemble(model_ptrs, test);

  // Artifacts. corrected.csv and report.json carry no paths or timestamps,
  // so re-running from the saved config reproduces them byte for byte.
  std::vector<std::string> artifacts = {"config.json", "train_noisy.csv",
                                        "test.csv", "corrected.csv",
                                        "history.json", "report.json"};
  write_json(dir / "config.json", cfg.to_json());
  write_corrected_csv(pool, (dir / "corrected.csv").string());
  write_json(dir / "history.json", history);

  std::vector<std::string> checkpoint_names;
  if (cfg.method == Method::kOrdac) {
    for (std::size_t k = 0; k < final_models.size(); ++k) {
      checkpoint_names.push_back("model_fold_" + std::to_string(k) + ".json");
    }
  } else {
    checkpoint_names.push_back("model.json");
  }
  for (std::size_t k = 0; k < final_models.size(); ++k) {
    const auto* mlp = dynamic_cast<const MlpRegressor*>(final_models[k].get());
    if (!mlp) throw std::logic_error("run: unexpected model type");
    write_json(dir / checkpoint_names[k], mlp->to_json());
    artifacts.push_back(checkpoint_names[k]);
  }

  nlohmann::ordered_json report_json;
  report_json["method"] = to_string(cfg.method);
  report_json["tau"] = cfg.noise.tau;
  nlohmann::ordered_json seeds_json;
  if (cfg.dataset.synthetic) seeds_json["data"] = cfg.dataset.synthetic->seed;
  seeds_json["noise"] = cfg.noise.seed;
  seeds_json["folds"] = cfg.folds.seed;
  seeds_json["model"] = cfg.model.seed;
  report_json["seeds"] = seeds_json;
  report_json["n_train"] = pool.size();
  report_json["n_test"] = test.size();
  report_json["realized_noise_rate"] = outcome.realized_noise_rate;
  report_json["label_quality"] = {
      {"noisy_mae", outcome.label_mae_noisy},
      {"corrected_mae", outcome.label_mae_corrected}};
  report_json["metrics"] = outcome.report.to_json();
  write_json(dir / "report.json", report_json);

  if (cfg.method == Method::kOrdacR) {
    nlohmann::ordered_json removed;
    removed["removed_ids"] = outcome.removed_ids;
    removed["kept"] = retrain_pool.size();
    write_json(dir / "removed_ids.json", removed);
    artifacts.push_back("removed_ids.json");
  }

  nlohmann::ordered_json manifest;
  manifest["dataset_hash"] = fnv1a64_hex(read_file(dir / "train_noisy.csv") +
                                         read_file(dir / "test.csv"));
  manifest["realized_noise_rate"] = outcome.realized_noise_rate;
  manifest["artifacts"] = artifacts;
  write_json(dir / "manifest.json", manifest);

  // Validate everything we just declared: reload each artifact.
  load_csv((dir / "train_noisy.csv").string(), pool.class_count);
  load_csv((dir / "test.csv").string(), pool.class_count);
  load_corrected_csv((dir / "corrected.csv").string(), pool.class_count);
  for (const std::string& name : checkpoint_names) {
    MlpRegressor::from_json(parse_json_file(dir / name));
  }
  parse_json_file(dir / "config.json");
  parse_json_file(dir / "history.json");
  parse_json_file(dir / "report.json");
  parse_json_file(dir / "manifest.json");

  return outcome;
}

std::vector<RunOutcome> run_all(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.repeats == 1) {
    return {run_experiment(cfg)};
  }

  std::set<std::tuple<std::uint64_t, std::uint64_t, std::uint64_t,
                      std::uint64_t>>
      seen;
  std::vector<ExperimentConfig> runs;
  for (int r = 0; r < cfg.repeats; ++r) {
    ExperimentConfig rc = cfg.for_repeat(r);
    const std::uint64_t data_seed =
        rc.dataset.synthetic ? rc.dataset.synthetic->seed : 0;
    if (!seen.insert({data_seed, rc.noise.seed, rc.folds.seed, rc.model.seed})
             .second) {
      throw ConfigError("run: seed collision across declared runs (repeat " +
                        std::to_string(r) + ")");
    }
    char name[32];
    std::snprintf(name, sizeof(name), "run_%03d", r);
    rc.output_dir = (fs::path(cfg.output_dir) / name).string();
    runs.push_back(std::move(rc));
  }

  std::vector<RunOutcome> outcomes;
  for (const ExperimentConfig& rc : runs) {
    outcomes.push_back(run_experiment(rc));
  }

  double mae_mean = 0.0, rec_mean = 0.0;
  for (const RunOutcome& o : outcomes) {
    mae_mean += o.report.macro_mae;
    rec_mean += o.report.macro_recall;
  }
  mae_mean /= outcomes.size();
  rec_mean /= outcomes.size();
  double mae_var = 0.0, rec_var = 0.0;
  for (const RunOutcome& o : outcomes) {
    mae_var += (o.report.macro_mae - mae_mean) * (o.report.macro_mae - mae_mean);
    rec_var +=
        (o.report.macro_recall - rec_mean) * (o.report.macro_recall - rec_mean);
  }
  const double denom = static_cast<double>(outcomes.size() - 1);
  nlohmann::ordered_json summary;
  summary["method"] = to_string(cfg.method);
  summary["tau"] = cfg.noise.tau;
  summary["repeats"] = cfg.repeats;
  summary["macro_mae"] = {{"mean", mae_mean},
                          {"std", std::sqrt(mae_var / denom)}};
  summary["macro_recall"] = {{"mean", rec_mean},
                             {"std", std::sqrt(rec_var / denom)}};
  nlohmann::ordered_json run_names = nlohmann::ordered_json::array();
  for (const RunOutcome& o : outcomes) {
    run_names.push_back(o.dir.filename().string());
  }
  summary["runs"] = run_names;
  fs::create_directories(cfg.output_dir);
  write_json(fs::path(cfg.output_dir) / "summary.json", summary);
  return outcomes;
}

void cmd_generate(const ExperimentConfig& cfg, const std::string& out_path) {
  if (!cfg.dataset.synthetic) {
    throw ConfigError("generate: config has no dataset.synthetic section");
  }
  const Dataset ds = generate_synthetic(*cfg.dataset.synthetic);
  const fs::path out(out_path);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  write_csv(ds, out_path);
}

nlohmann::ordered_json cmd_inject(const ExperimentConfig& cfg,
                                  const std::string& in_path,
                                  const std::string& out_path,
                                  const std::string& summary_path) {
  Dataset ds = load_csv(in_path, cfg.dataset.class_count);
  const NoiseMatrix matrix =
      build_noise_matrix(ds.class_count, cfg.noise.tau, cfg.noise.sigma_n);
  const std::vector<int> clean = pool_labels(ds);
  const std::vector<int> noisy = inject_noise(clean, matrix, cfg.noise.seed);

  std::vector<int> distance_counts(static_cast<std::size_t>(ds.class_count), 0);
  int flipped = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const int d = std::abs(noisy[i] - clean[i]);
    ++distance_counts[static_cast<std::size_t>(d)];
    if (d != 0) ++flipped;
    ds.samples[i].label_original = noisy[i];
    ds.samples[i].label_true = clean[i];  // input labels are the ground truth
  }
  reset_distributions(ds, kDefaultStdInit);

  const fs::path out(out_path);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  write_csv(ds, out_path);

  nlohmann::ordered_json summary;
  summary["tau"] = cfg.noise.tau;
  summary["sigma_n"] = cfg.noise.sigma_n;
  summary["seed"] = cfg.noise.seed;
  summary["n"] = ds.size();
  summary["flipped"] = flipped;
  summary["realized_rate"] =
      static_cast<double>(flipped) / static_cast<double>(ds.size());
  summary["distance_counts"] = distance_counts;
  write_json(summary_path, summary);
  return summary;
}

EvalReport cmd_evaluate(const std::vector<std::string>& model_paths,
                        const std::string& data_path,
                        const std::string& out_path) {
  if (model_paths.empty()) {
    throw ConfigError("evaluate: at least one --model is required");
  }
  std::vector<MlpRegressor> models;
  models.reserve(model_paths.size());
  for (const std::string& p : model_paths) {
    models.push_back(MlpRegressor::from_json(parse_json_file(p)));
  }
  const Dataset data = load_csv(data_path, models.front().class_count());
  std::vector<const LdlModel*> ptrs;
  for (const MlpRegressor& m : models) ptrs.push_back(&m);
  const EvalReport report = evaluate_ensemble(ptrs, data);
  if (!out_path.empty()) {
    write_json(out_path, report.to_json());
  }
  return report;
}

std::vector<AggregateRow> aggregate_runs(
    const std::vector<std::string>& run_dirs) {
  if (run_dirs.empty()) throw ConfigError("report: no run directories given");
  struct Key {
    int order;
    double tau;
    std::string method;
    bool operator<(const Key& other) const {
      if (order != other.order) return order < other.order;
      return tau < other.tau;
    }
  };
  const std::map<std::string, int> method_order = {
      {"baseline", 0}, {"ordac", 1}, {"ordac_c", 2}, {"ordac_r", 3}};

  std::map<Key, std::vector<std::pair<double, double>>> groups;
  for (const std::string& dir : run_dirs) {
    const fs::path report_path = fs::path(dir) / "report.json";
    if (!fs::exists(report_path)) {
      throw DataError("report: missing " + report_path.string());
    }
    const nlohmann::json j = parse_json_file(report_path);
    const std::string method = j.at("method").get<std::string>();
    const auto it = method_order.find(method);
    const Key key{it == method_order.end() ? 99 : it->second,
                  j.at("tau").get<double>(), method};
    groups[key].push_back({j.at("metrics").at("macro_mae").get<double>(),
                           j.at("metrics").at("macro_recall").get<double>()});
  }

  std::vector<AggregateRow> rows;
  for (const auto& [key, values] : groups) {
    AggregateRow row;
    row.method = key.method;
    row.tau = key.tau;
    row.runs = static_cast<int>(values.size());
    for (const auto& [mae, rec] : values) {
      row.mae_mean += mae;
      row.rec_mean += rec;
    }
    row.mae_mean /= values.size();
    row.rec_mean /= values.size();
    if (values.size() > 1) {
      double mae_var = 0.0, rec_var = 0.0;
      for (const auto& [mae, rec] : values) {
        mae_var += (mae - row.mae_mean) * (mae - row.mae_mean);
        rec_var += (rec - row.rec_mean) * (rec - row.rec_mean);
      }
      row.mae_std = std::sqrt(mae_var / (values.size() - 1));
      row.rec_std = std::sqrt(rec_var / (values.size() - 1));
    }
    rows.push_back(row);
  }
  return rows;
}

std::string render_table(const std::vector<AggregateRow>& rows) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-10s %-6s %-5s %-20s %-20s\n", "method",
                "tau", "runs", "macro_mae", "macro_recall");
  out << line;
  out << std::string(64, '-') << "\n";
  for (const AggregateRow& r : rows) {
    char mae[40], rec[40];
    std::snprintf(mae, sizeof(mae), "%.4f +/- %.4f", r.mae_mean, r.mae_std);
    std::snprintf(rec, sizeof(rec), "%.4f +/- %.4f", r.rec_mean, r.rec_std);
    std::snprintf(line, sizeof(line), "%-10s %-6s %-5d %-20s %-20s\n",
                  r.method.c_str(), format_tau(r.tau).c_str(), r.runs, mae,
                  rec);
    out << line;
  }
  return out.str();
}

void write_aggregate_csv(const std::vector<AggregateRow>& rows,
                         const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << "method,tau,runs,mae_mean,mae_std,rec_mean,rec_std\n";
  char buf[200];
  for (const AggregateRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%.17g,%d,%.17g,%.17g,%.17g,%.17g\n",
                  r.method.c_str(), r.tau, r.runs, r.mae_mean, r.mae_std,
                  r.rec_mean, r.rec_std);
    out << buf;
  }
}

}  // namespace ordac
