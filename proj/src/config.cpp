#include "ordac/config.hpp"

#include <fstream>
#include <set>

#include "ordac/errors.hpp"
#include "ordac/rng.hpp"

namespace ordac {

namespace {

void check_keys(const nlohmann::json& j, const std::set<std::string>& allowed,
                const std::string& context) {
  if (!j.is_object()) {
    throw ConfigError("config: '" + context + "' must be a JSON object");
  }
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) {
      throw ConfigError("config: unknown key '" + item.key() + "' in " +
                        context);
    }
  }
}

template <typename T>
void read_if(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

std::string to_string(Method method) {
  switch (method) {
    case Method::kBaseline: return "baseline";
    case Method::kOrdac: return "ordac";
    case Method::kOrdacC: return "ordac_c";
    case Method::kOrdacR: return "ordac_r";
  }
  return "unknown";
}

Method method_from_string(const std::string& name) {
  if (name == "baseline") return Method::kBaseline;
  if (name == "ordac") return Method::kOrdac;
  if (name == "ordac_c") return Method::kOrdacC;
  if (name == "ordac_r") return Method::kOrdacR;
  throw ConfigError("unknown method '" + name +
                    "' (expected baseline, ordac, ordac_c or ordac_r)");
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  check_keys(j, {"dataset", "noise", "method", "correction", "model", "folds",
                 "test_fraction", "output_dir", "repeats"},
             "config");
  ExperimentConfig cfg;

  if (j.contains("dataset")) {
    const auto& d = j.at("dataset");
    check_keys(d, {"synthetic", "csv", "classes"}, "dataset");
    if (d.contains("synthetic")) {
      const auto& s = d.at("synthetic");
      check_keys(s,
                 {"classes", "features", "n_per_class", "per_class",
                  "separation", "spread", "seed"},
                 "dataset.synthetic");
      SyntheticSpec spec;
      read_if(s, "classes", spec.class_count);
      read_if(s, "features", spec.feature_dim);
      read_if(s, "n_per_class", spec.n_per_class);
      read_if(s, "per_class", spec.per_class);
      read_if(s, "separation", spec.separation);
      read_if(s, "spread", spec.spread);
      read_if(s, "seed", spec.seed);
      cfg.dataset.synthetic = spec;
    }
    if (d.contains("csv")) cfg.dataset.csv_path = d.at("csv").get<std::string>();
    read_if(d, "classes", cfg.dataset.class_count);
  }

  if (j.contains("noise")) {
    const auto& n = j.at("noise");
    check_keys(n, {"tau", "sigma_n", "seed"}, "noise");
    read_if(n, "tau", cfg.noise.tau);
    read_if(n, "sigma_n", cfg.noise.sigma_n);
    read_if(n, "seed", cfg.noise.seed);
  }

  if (j.contains("method")) {
    cfg.method = method_from_string(j.at("method").get<std::string>());
  }

  if (j.contains("correction")) {
    const auto& c = j.at("correction");
    check_keys(c,
               {"alpha_base", "beta_base", "max_epochs", "correction_start",
                "std_init", "epsilon", "debias"},
               "correction");
    read_if(c, "alpha_base", cfg.correction.alpha_base);
    read_if(c, "beta_base", cfg.correction.beta_base);
    read_if(c, "max_epochs", cfg.correction.max_epochs);
    read_if(c, "correction_start", cfg.correction.correction_start);
    read_if(c, "std_init", cfg.correction.std_init);
    read_if(c, "epsilon", cfg.correction.epsilon);
    read_if(c, "debias", cfg.correction.debias);
  }

  if (j.contains("model")) {
    const auto& m = j.at("model");
    check_keys(m, {"hidden", "learning_rate", "batch_size", "seed"}, "model");
    read_if(m, "hidden", cfg.model.hidden);
    read_if(m, "learning_rate", cfg.model.learning_rate);
    read_if(m, "batch_size", cfg.model.batch_size);
    read_if(m, "seed", cfg.model.seed);
  }

  if (j.contains("folds")) {
    const auto& f = j.at("folds");
    check_keys(f, {"count", "seed"}, "folds");
    read_if(f, "count", cfg.folds.count);
    read_if(f, "seed", cfg.folds.seed);
  }

  read_if(j, "test_fraction", cfg.test_fraction);
  read_if(j, "output_dir", cfg.output_dir);
  read_if(j, "repeats", cfg.repeats);
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
  return from_json(j);
}

nlohmann::ordered_json ExperimentConfig::to_json() const {
  nlohmann::ordered_json j;
  nlohmann::ordered_json d;
  if (dataset.synthetic) {
    const SyntheticSpec& s = *dataset.synthetic;
    nlohmann::ordered_json sj;
    sj["classes"] = s.class_count;
    sj["features"] = s.feature_dim;
    if (s.per_class.empty()) {
      sj["n_per_class"] = s.n_per_class;
    } else {
      sj["per_class"] = s.per_class;
    }
    sj["separation"] = s.separation;
    sj["spread"] = s.spread;
    sj["seed"] = s.seed;
    d["synthetic"] = sj;
  }
  if (dataset.csv_path) d["csv"] = *dataset.csv_path;
  if (dataset.class_count > 0) d["classes"] = dataset.class_count;
  j["dataset"] = d;
  j["noise"] = {{"tau", noise.tau}, {"sigma_n", noise.sigma_n},
                {"seed", noise.seed}};
  j["method"] = to_string(method);
  j["correction"] = {{"alpha_base", correction.alpha_base},
                     {"beta_base", correction.beta_base},
                     {"max_epochs", correction.max_epochs},
                     {"correction_start", correction.correction_start},
                     {"std_init", correction.std_init},
                     {"epsilon", correction.epsilon},
                     {"debias", correction.debias}};
  j["model"] = {{"hidden", model.hidden},
                {"learning_rate", model.learning_rate},
                {"batch_size", model.batch_size},
                {"seed", model.seed}};
  j["folds"] = {{"count", folds.count}, {"seed", folds.seed}};
  j["test_fraction"] = test_fraction;
  j["output_dir"] = output_dir;
  j["repeats"] = repeats;
  return j;
}

void ExperimentConfig::validate() const {
  if (dataset.synthetic.has_value() == dataset.csv_path.has_value()) {
    throw ConfigError(
        "config: dataset needs exactly one of 'synthetic' or 'csv'");
  }
  if (!(noise.tau >= 0.0 && noise.tau < 1.0)) {
    throw ConfigError("config: noise.tau must lie in [0, 1)");
  }
  if (!(noise.sigma_n > 0.0)) {
    throw ConfigError("config: noise.sigma_n must be > 0");
  }
  if (model.hidden < 1 || model.batch_size < 1 ||
      !(model.learning_rate >= 0.0)) {
    throw ConfigError("config: invalid model section");
  }
  if (folds.count < 2) {
    throw ConfigError("config: folds.count must be >= 2");
  }
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ConfigError("config: test_fraction must lie in (0, 1)");
  }
  if (repeats < 1) {
    throw ConfigError("config: repeats must be >= 1");
  }
  correction.validate();
}

ExperimentConfig ExperimentConfig::for_repeat(int r) const {
  ExperimentConfig cfg = *this;
  cfg.repeats = 1;
  if (r > 0) {
    const std::uint64_t index = static_cast<std::uint64_t>(r);
    cfg.noise.seed = derive_seed(noise.seed, seed_stream::kRepeat, index);
    cfg.folds.seed = derive_seed(folds.seed, seed_stream::kRepeat, index);
    cfg.model.seed = derive_seed(model.seed, seed_stream::kRepeat, index);
    if (cfg.dataset.synthetic) {
      cfg.dataset.synthetic->seed =
          derive_seed(dataset.synthetic->seed, seed_stream::kRepeat, index);
    }
  }
  return cfg;
}

}  // namespace ordac
