#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "ordac/errors.hpp"
#include "ordac/metrics.hpp"
#include "ordac/rng.hpp"

using namespace ordac;

TEST_CASE("macro_mae: perfect, mixed, and absent classes") {
  const std::vector<double> perfect = {0.0, 1.0, 2.0};
  const std::vector<int> truths_a = {0, 1, 2};
  CHECK(macro_mae(perfect, truths_a, 3) == 0.0);

  // class 0: MAE 0; class 2: (1 + 0) / 2 = 0.5; class 1 absent.
  const std::vector<double> preds = {0.0, 1.0, 2.0};
  const std::vector<int> truths_b = {0, 2, 2};
  CHECK(macro_mae(preds, truths_b, 3) == doctest::Approx(0.25).epsilon(1e-12));
}

// Macro metrics ignore class frequency: duplicating every class-c sample m
// times leaves every per-class entry (and both macro values) unchanged.
TEST_CASE("macro metrics: class-frequency invariance") {
  Rng rng(3);
  for (int iter = 0; iter < 50; ++iter) {
    const int C = 2 + static_cast<int>(rng.next_index(6));
    const int n = 5 + static_cast<int>(rng.next_index(40));
    std::vector<double> preds;
    std::vector<int> truths;
    for (int i = 0; i < n; ++i) {
      preds.push_back(rng.next_double() * (C - 1));
      truths.push_back(static_cast<int>(rng.next_index(static_cast<std::size_t>(C))));
    }
    const int c = truths[rng.next_index(truths.size())];
    const int m = 1 + static_cast<int>(rng.next_index(4));

    std::vector<double> preds2 = preds;
    std::vector<int> truths2 = truths;
    for (std::size_t i = 0; i < preds.size(); ++i) {
      if (truths[i] != c) continue;
      for (int k = 0; k < m; ++k) {
        preds2.push_back(preds[i]);
        truths2.push_back(truths[i]);
      }
    }
    const EvalReport a = evaluate_ranks(preds, truths, C);
    const EvalReport b = evaluate_ranks(preds2, truths2, C);
    CHECK(a.macro_mae == doctest::Approx(b.macro_mae).epsilon(1e-12));
    CHECK(a.macro_recall == doctest::Approx(b.macro_recall).epsilon(1e-12));
    for (int k = 0; k < C; ++k) {
      if (a.n_per_class[static_cast<std::size_t>(k)] == 0) continue;
      CHECK(a.per_class_mae[static_cast<std::size_t>(k)] ==
            doctest::Approx(b.per_class_mae[static_cast<std::size_t>(k)])
                .epsilon(1e-12));
      CHECK(a.per_class_recall[static_cast<std::size_t>(k)] ==
            doctest::Approx(b.per_class_recall[static_cast<std::size_t>(k)])
                .epsilon(1e-12));
    }
  }
}

TEST_CASE("macro_recall: hand counts and order invariance") {
  const std::vector<double> all_right = {0.0, 1.0, 2.0};
  const std::vector<int> truths = {0, 1, 2};
  CHECK(macro_recall(all_right, truths, 3) == 1.0);

  const std::vector<double> preds = {0.0, 0.0, 2.0};
  const std::vector<int> truths_b = {0, 1, 2};
  CHECK(macro_recall(preds, truths_b, 3) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  const std::vector<double> shuffled_preds = {2.0, 0.0, 0.0};
  const std::vector<int> shuffled_truths = {2, 1, 0};
  CHECK(macro_recall(shuffled_preds, shuffled_truths, 3) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("label_quality: hand arithmetic and the power-mean inequality") {
  {
    const std::vector<double> mus = {0.0, 1.0, 2.0};
    const std::vector<int> truths = {0, 1, 2};
    const auto [mae, rmse] = label_quality(mus, truths);
    CHECK(mae == 0.0);
    CHECK(rmse == 0.0);
  }
  {
    const std::vector<double> mus = {1.5, 2.0};
    const std::vector<int> truths = {1, 3};
    const auto [mae, rmse] = label_quality(mus, truths);
    CHECK(mae == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(std::abs(rmse - 0.79056941504209488) <= 1e-12);
  }
  Rng rng(9);
  for (int iter = 0; iter < 100; ++iter) {
    const int n = 1 + static_cast<int>(rng.next_index(30));
    std::vector<double> mus;
    std::vector<int> truths;
    for (int i = 0; i < n; ++i) {
      mus.push_back(4.0 * rng.next_double());
      truths.push_back(static_cast<int>(rng.next_index(5)));
    }
    const auto [mae, rmse] = label_quality(mus, truths);
    CHECK(rmse >= mae - 1e-12);
  }
}

TEST_CASE("metric bounds under fuzzing") {
  Rng rng(12);
  for (int iter = 0; iter < 100; ++iter) {
    const int C = 2 + static_cast<int>(rng.next_index(6));
    const int n = 1 + static_cast<int>(rng.next_index(50));
    std::vector<double> preds;
    std::vector<int> truths;
    for (int i = 0; i < n; ++i) {
      preds.push_back(rng.next_double() * 2.0 * C - C / 2.0);
      truths.push_back(static_cast<int>(rng.next_index(static_cast<std::size_t>(C))));
    }
    const EvalReport r = evaluate_ranks(preds, truths, C);
    CHECK(r.macro_recall >= 0.0);
    CHECK(r.macro_recall <= 1.0);
    CHECK(r.macro_mae >= 0.0);
    CHECK(r.macro_mae <= C - 1.0);
    // Macro values are the means of present per-class entries.
    double mae_sum = 0.0, rec_sum = 0.0;
    int present = 0;
    for (int c = 0; c < C; ++c) {
      if (r.n_per_class[static_cast<std::size_t>(c)] == 0) {
        CHECK(std::isnan(r.per_class_mae[static_cast<std::size_t>(c)]));
        continue;
      }
      mae_sum += r.per_class_mae[static_cast<std::size_t>(c)];
      rec_sum += r.per_class_recall[static_cast<std::size_t>(c)];
      ++present;
    }
    CHECK(r.macro_mae == doctest::Approx(mae_sum / present).epsilon(1e-12));
    CHECK(r.macro_recall == doctest::Approx(rec_sum / present).epsilon(1e-12));
  }
}

TEST_CASE("metrics: error paths") {
  const std::vector<double> empty_preds;
  const std::vector<int> empty_truths;
  CHECK_THROWS_AS(macro_mae(empty_preds, empty_truths, 3), DataError);
  CHECK_THROWS_AS(label_quality(empty_preds, empty_truths), DataError);

  const std::vector<double> preds = {1.0, 2.0};
  const std::vector<int> one_truth = {1};
  CHECK_THROWS_AS(macro_mae(preds, one_truth, 3), DimensionError);
  CHECK_THROWS_AS(label_quality(preds, one_truth), DimensionError);

  const std::vector<int> bad_truths = {1, 3};
  CHECK_THROWS_AS(macro_recall(preds, bad_truths, 3), DataError);
}

TEST_CASE("EvalReport: JSON round trip with absent classes as null") {
  const std::vector<double> preds = {0.0, 2.0, 2.0};
  const std::vector<int> truths = {0, 2, 2};
  const EvalReport r = evaluate_ranks(preds, truths, 3);
  const nlohmann::ordered_json j = r.to_json();
  CHECK(j.at("per_class_mae").at(1).is_null());
  const EvalReport back = EvalReport::from_json(j);
  CHECK(back.macro_mae == r.macro_mae);
  CHECK(back.macro_recall == r.macro_recall);
  CHECK(back.n_per_class == r.n_per_class);
  CHECK(std::isnan(back.per_class_mae[1]));
  CHECK(back.per_class_recall[0] == r.per_class_recall[0]);
}
