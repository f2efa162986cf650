#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include "ordac/correction.hpp"
#include "ordac/data.hpp"
#include "ordac/errors.hpp"
#include "ordac/metrics.hpp"
#include "ordac/mlp.hpp"
#include "ordac/rng.hpp"

using namespace ordac;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / "ordac_data_test";
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

}  // namespace

TEST_CASE("generate_synthetic: deterministic with exact class counts") {
  SyntheticSpec spec;
  spec.seed = 7;
  const Dataset a = generate_synthetic(spec);
  const Dataset b = generate_synthetic(spec);
  CHECK(datasets_equal(a, b));
  CHECK(a.size() == 1000);
  CHECK(a.feature_dim == 4);

  std::vector<int> counts(5, 0);
  for (const Sample& s : a.samples) {
    REQUIRE(s.label_true.has_value());
    CHECK(*s.label_true == s.label_original);
    ++counts[static_cast<std::size_t>(s.label_original)];
  }
  CHECK(counts == std::vector<int>{200, 200, 200, 200, 200});

  SyntheticSpec other = spec;
  other.seed = 8;
  CHECK_FALSE(datasets_equal(a, generate_synthetic(other)));
}

TEST_CASE("generate_synthetic: explicit per-class counts and validation") {
  SyntheticSpec spec;
  spec.per_class = {40, 120, 400, 120, 40};
  spec.seed = 1;
  const Dataset ds = generate_synthetic(spec);
  CHECK(ds.size() == 720);
  std::vector<int> counts(5, 0);
  for (const Sample& s : ds.samples) {
    ++counts[static_cast<std::size_t>(s.label_original)];
  }
  CHECK(counts == spec.per_class);

  SyntheticSpec bad = spec;
  bad.per_class = {1, 2};
  CHECK_THROWS_AS(generate_synthetic(bad), ConfigError);
  bad = spec;
  bad.spread = 0.0;
  CHECK_THROWS_AS(generate_synthetic(bad), ConfigError);
  bad = spec;
  bad.class_count = 1;
  CHECK_THROWS_AS(generate_synthetic(bad), ConfigError);
}

// Near-zero spread makes the classes perfectly separable; a short training
// run should then classify nearly everything correctly.
TEST_CASE("generate_synthetic: vanishing spread is trivially learnable") {
  SyntheticSpec spec;
  spec.class_count = 3;
  spec.feature_dim = 2;
  spec.n_per_class = 40;
  spec.spread = 0.01;
  spec.seed = 4;
  Dataset ds = generate_synthetic(spec);
  reset_distributions(ds, 0.75);

  CorrectionParams params;
  params.max_epochs = 120;
  const MlpRegressor proto(ds.feature_dim, 16, ds.class_count, 0);
  const auto model =
      train_on_corrected(ds, params, proto, SgdOptions{0.1, 16}, 5);

  std::vector<double> preds;
  std::vector<int> truths;
  for (const Sample& s : ds.samples) {
    preds.push_back(predict_rank(*model, s.features).y_hat);
    truths.push_back(*s.label_true);
  }
  CHECK(macro_recall(preds, truths, ds.class_count) > 0.99);
}

TEST_CASE("split_folds: exact stratification in the small cases") {
  {
    // Ten samples of one class into five folds: exactly two per fold.
    Dataset ds;
    ds.class_count = 2;
    ds.feature_dim = 1;
    for (int i = 0; i < 10; ++i) ds.samples.push_back(make_sample(i, {0.0}, 1, 1));
    const FoldPlan plan = split_folds(ds, 5, 3);
    std::vector<int> sizes(5, 0);
    for (const int f : plan.assignment) ++sizes[static_cast<std::size_t>(f)];
    CHECK(sizes == std::vector<int>{2, 2, 2, 2, 2});
  }
  {
    // Two classes of five each into five folds: one of each per fold.
    Dataset ds;
    ds.class_count = 2;
    ds.feature_dim = 1;
    for (int i = 0; i < 10; ++i) {
      ds.samples.push_back(make_sample(i, {0.0}, i < 5 ? 0 : 1, i < 5 ? 0 : 1));
    }
    const FoldPlan plan = split_folds(ds, 5, 9);
    for (int k = 0; k < 5; ++k) {
      const std::vector<int> ids = plan.valid_ids(k);
      REQUIRE(ids.size() == 2);
      int zeros = 0, ones = 0;
      for (const int id : ids) {
        (ds.samples[static_cast<std::size_t>(id)].label_original == 0 ? zeros : ones)++;
      }
      CHECK(zeros == 1);
      CHECK(ones == 1);
    }
  }
}

TEST_CASE("split_folds: partition properties under fuzzing") {
  Rng rng(15);
  for (int iter = 0; iter < 100; ++iter) {
    const int C = 2 + static_cast<int>(rng.next_index(5));
    Dataset ds;
    ds.class_count = C;
    ds.feature_dim = 1;
    int id = 0;
    for (int c = 0; c < C; ++c) {
      const int n_c = 1 + static_cast<int>(rng.next_index(30));
      for (int i = 0; i < n_c; ++i) {
        ds.samples.push_back(make_sample(id++, {0.0}, c, c));
      }
    }
    const int max_k = std::min<int>(6, static_cast<int>(ds.size()));
    if (max_k < 2) continue;
    const int K = 2 + static_cast<int>(rng.next_index(static_cast<std::size_t>(max_k - 1)));
    const FoldPlan plan = split_folds(ds, K, rng.next_u64());

    // Folds partition the ids.
    std::set<int> seen;
    for (int k = 0; k < K; ++k) {
      for (const int v : plan.valid_ids(k)) {
        CHECK(seen.insert(v).second);
      }
      // Train + valid covers everything exactly once.
      CHECK(plan.valid_ids(k).size() + plan.train_ids(k).size() == ds.size());
    }
    CHECK(seen.size() == ds.size());

    // Per-class fold counts within one of each other.
    for (int c = 0; c < C; ++c) {
      std::vector<int> counts(static_cast<std::size_t>(K), 0);
      for (const Sample& s : ds.samples) {
        if (s.label_original == c) {
          ++counts[static_cast<std::size_t>(plan.assignment[static_cast<std::size_t>(s.id)])];
        }
      }
      const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
      CHECK(*hi - *lo <= 1);
    }
  }
}

TEST_CASE("split_folds: rejects bad fold counts") {
  Dataset ds;
  ds.class_count = 2;
  ds.feature_dim = 1;
  for (int i = 0; i < 4; ++i) ds.samples.push_back(make_sample(i, {0.0}, 0, 0));
  CHECK_THROWS_AS(split_folds(ds, 5, 1), ConfigError);
  CHECK_THROWS_AS(split_folds(ds, 1, 1), ConfigError);
  CHECK(split_folds(ds, 4, 1).fold_count == 4);
}

TEST_CASE("stratified_split: per-class proportions and determinism") {
  SyntheticSpec spec;
  spec.n_per_class = 50;
  spec.seed = 2;
  const Dataset ds = generate_synthetic(spec);
  const auto [rest, held] = stratified_split(ds, 0.2, 77);
  CHECK(rest.size() == 200);
  CHECK(held.size() == 50);
  std::vector<int> held_counts(5, 0);
  for (const int id : held) {
    ++held_counts[static_cast<std::size_t>(ds.samples[static_cast<std::size_t>(id)].label_original)];
  }
  CHECK(held_counts == std::vector<int>{10, 10, 10, 10, 10});

  const auto again = stratified_split(ds, 0.2, 77);
  CHECK(again.first == rest);
  CHECK(again.second == held);
  const auto different = stratified_split(ds, 0.2, 78);
  CHECK(different.second != held);

  CHECK_THROWS_AS(stratified_split(ds, 1.0, 1), ConfigError);
}

TEST_CASE("subset: dense re-indexing and bounds") {
  const Dataset ds = generate_synthetic(SyntheticSpec{});
  const std::vector<int> ids = {5, 0, 999};
  const Dataset sub = subset(ds, ids);
  REQUIRE(sub.size() == 3);
  CHECK(sub.samples[0].id == 0);
  CHECK(sub.samples[1].id == 1);
  CHECK(sub.samples[2].id == 2);
  CHECK(sub.samples[0].features == ds.samples[5].features);
  const std::vector<int> bad = {1000};
  CHECK_THROWS_AS(subset(ds, bad), DataError);
}

TEST_CASE("CSV: minimal file, aliases, and validation errors") {
  const fs::path dir = temp_dir();

  SUBCASE("minimal two-row file with d=1") {
    const fs::path p = dir / "mini.csv";
    write_text(p, "f0,label\n0.5,0\n-1.25,1\n");
    const Dataset ds = load_csv(p.string());
    REQUIRE(ds.size() == 2);
    CHECK(ds.feature_dim == 1);
    CHECK(ds.class_count == 2);
    CHECK(ds.samples[0].features[0] == 0.5);
    CHECK(ds.samples[1].label_original == 1);
    CHECK_FALSE(ds.samples[0].label_true.has_value());
  }

  SUBCASE("label_noisy is accepted as the label column") {
    const fs::path p = dir / "alias.csv";
    write_text(p, "f0,label_noisy,label_true\n0.1,2,1\n0.2,0,0\n");
    const Dataset ds = load_csv(p.string());
    CHECK(ds.samples[0].label_original == 2);
    CHECK(ds.samples[0].label_true == 1);
  }

  SUBCASE("label at the rank count is rejected when a hint is given") {
    const fs::path p = dir / "range.csv";
    write_text(p, "f0,label\n0.1,3\n");
    CHECK_THROWS_AS(load_csv(p.string(), 3), DataError);
    CHECK(load_csv(p.string(), 4).class_count == 4);
  }

  SUBCASE("malformed rows name the line number") {
    const fs::path p = dir / "short_row.csv";
    write_text(p, "f0,f1,label\n0.1,0.2,1\n0.3,2\n");
    try {
      load_csv(p.string());
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
  }

  SUBCASE("non-integer and negative labels are rejected") {
    const fs::path p = dir / "bad_label.csv";
    write_text(p, "f0,label\n0.1,1.5\n");
    CHECK_THROWS_AS(load_csv(p.string()), DataError);
    write_text(p, "f0,label\n0.1,-1\n");
    CHECK_THROWS_AS(load_csv(p.string()), DataError);
  }

  SUBCASE("ids must be dense and in order") {
    const fs::path p = dir / "bad_id.csv";
    write_text(p, "id,f0,label\n0,0.1,0\n2,0.2,1\n");
    CHECK_THROWS_AS(load_csv(p.string()), DataError);
  }

  SUBCASE("missing label column and empty file") {
    const fs::path p = dir / "no_label.csv";
    write_text(p, "f0,f1\n0.1,0.2\n");
    CHECK_THROWS_AS(load_csv(p.string()), DataError);
    write_text(p, "");
    CHECK_THROWS_AS(load_csv(p.string()), DataError);
    CHECK_THROWS_AS(load_csv((dir / "missing.csv").string()), DataError);
  }
}

TEST_CASE("CSV: synthetic benchmark round-trips exactly") {
  const fs::path dir = temp_dir();
  SyntheticSpec spec;
  spec.seed = 31;
  const Dataset ds = generate_synthetic(spec);
  const fs::path p = dir / "bench.csv";
  write_csv(ds, p.string());
  const Dataset back = load_csv(p.string(), ds.class_count);
  CHECK(datasets_equal(ds, back));

  // 17 significant digits survive a second round trip bit for bit.
  const fs::path p2 = dir / "bench2.csv";
  write_csv(back, p2.string());
  std::ifstream a(p), b(p2);
  const std::string sa((std::istreambuf_iterator<char>(a)), {});
  const std::string sb((std::istreambuf_iterator<char>(b)), {});
  CHECK(sa == sb);
}

TEST_CASE("CSV: corrected export preserves mu and sigma exactly") {
  const fs::path dir = temp_dir();
  SyntheticSpec spec10;
  spec10.n_per_class = 10;
  spec10.seed = 3;
  Dataset ds = generate_synthetic(spec10);
  Rng rng(5);
  for (Sample& s : ds.samples) {
    s.dist.mu = rng.next_double() * 4.0;
    s.dist.sigma = 0.01 + rng.next_double();
  }
  const fs::path p = dir / "corrected.csv";
  write_corrected_csv(ds, p.string());
  const Dataset back = load_corrected_csv(p.string(), ds.class_count);
  REQUIRE(back.size() == ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    CHECK(back.samples[i].dist.mu == ds.samples[i].dist.mu);
    CHECK(back.samples[i].dist.sigma == ds.samples[i].dist.sigma);
    CHECK(back.samples[i].label_original == ds.samples[i].label_original);
  }
}

TEST_CASE("reset_distributions re-arms every sample") {
  SyntheticSpec spec5;
  spec5.n_per_class = 5;
  spec5.seed = 1;
  Dataset ds = generate_synthetic(spec5);
  for (Sample& s : ds.samples) s.dist = {3.3, 2.0};
  reset_distributions(ds, 0.6);
  for (const Sample& s : ds.samples) {
    CHECK(s.dist.mu == static_cast<double>(s.label_original));
    CHECK(s.dist.sigma == 0.6);
  }
}
