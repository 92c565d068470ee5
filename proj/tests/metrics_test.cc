// Copyright 2026 The BMIML Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cmath>

#include "bmiml/metrics.h"
#include "oracles.h"
#include "test_util.h"

namespace bmiml {
namespace {

using testing::random_labels;
using testing::thrown_kind;
using testing::uniform;

Matrix rows2(std::initializer_list<std::initializer_list<double>> r) {
  Matrix m(static_cast<Index>(r.size()), static_cast<Index>(r.begin()->size()));
  Index i = 0;
  for (const auto& row : r) {
    Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

TEST_CASE("hamming loss worked cases") {
  const Matrix y = rows2({{1, 0, 1}, {0, 1, 0}});
  CHECK(hamming_loss(y, y) == 0.0);
  CHECK(hamming_loss(Matrix::Ones(2, 3) - y, y) == 1.0);
  Matrix p = y;
  p(0, 1) = 1;
  p(1, 1) = 0;
  CHECK(hamming_loss(p, y) == 2.0 / 6.0);
  CHECK(thrown_kind([&] { hamming_loss(Matrix::Zero(2, 2), y); }) ==
        ErrorKind::kDimensionMismatch);
}

TEST_CASE("ranking metric worked cases") {
  CHECK(one_error(rows2({{0.9, 0.1}}), rows2({{0, 1}})) == 1.0);
  CHECK(one_error(rows2({{0.9, 0.1}}), rows2({{1, 0}})) == 0.0);
  // Tie on top goes to class 0.
  CHECK(one_error(rows2({{0.5, 0.5}}), rows2({{0, 1}})) == 1.0);

  CHECK(ranking_loss(rows2({{0.9, 0.1, 0.2}}), rows2({{1, 0, 0}})) == 0.0);
  CHECK(ranking_loss(rows2({{0.1, 0.9, 0.8}}), rows2({{1, 0, 0}})) == 1.0);
  CHECK(ranking_loss(rows2({{0.5, 0.5}}), rows2({{1, 0}})) == 0.5);

  CHECK(average_precision(rows2({{0.9, 0.1, 0.2}}), rows2({{1, 0, 0}})) == 1.0);
  // True class ranked second of three.
  CHECK(average_precision(rows2({{0.5, 0.9, 0.1}}), rows2({{1, 0, 0}})) == 0.5);
  // Truth {0, 2}, ranks 1 and 3: (1/1 + 2/3) / 2.
  CHECK(average_precision(rows2({{0.9, 0.5, 0.1}}), rows2({{1, 0, 1}})) ==
        doctest::Approx(5.0 / 6.0).epsilon(1e-15));
}

TEST_CASE("metrics match brute force on 200 random instances and stay in [0, 1]") {
  SeededRng rng(1, 0);
  testing::WarningCapture quiet;
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = 1 + static_cast<Index>(rng.uniform_index(20));
    const Index k = 2 + static_cast<Index>(rng.uniform_index(5));
    Matrix s = uniform(n, k, rng, 0, 1);
    // Coarse scores on some trials to exercise ties.
    if (trial % 3 == 0) s = (s * 4).array().round() / 4;
    const Matrix y = random_labels(n, k, rng);
    const Matrix p = random_labels(n, k, rng, false);
    const MetricValues v = evaluate_predictions(p, s, y);
    CHECK(v.hamming_loss == oracle::hamming_loss(p, y));
    CHECK(std::abs(v.one_error - oracle::one_error(s, y)) <= 1e-12);
    CHECK(std::abs(v.ranking_loss - oracle::ranking_loss(s, y)) <= 1e-12);
    CHECK(std::abs(v.average_precision - oracle::average_precision(s, y)) <= 1e-12);
    for (double m : {v.hamming_loss, v.one_error, v.ranking_loss, v.average_precision}) {
      CHECK(m >= 0.0);
      CHECK(m <= 1.0);
    }
  }
}

TEST_CASE("a perfect predictor scores (0, 0, 0, 1)") {
  SeededRng rng(2, 0);
  const Matrix y = random_labels(30, 5, rng);
  Matrix s = y;
  s.array() += 0.1 * uniform(30, 5, rng, 0, 1).array();  // positives strictly above negatives
  testing::WarningCapture quiet;
  const MetricValues v = evaluate_predictions(y, s, y);
  CHECK(v.hamming_loss == 0.0);
  CHECK(v.one_error == 0.0);
  CHECK(v.ranking_loss == 0.0);
  CHECK(v.average_precision == 1.0);
}

TEST_CASE("inverting tie-free scores maps ranking loss to its complement") {
  SeededRng rng(3, 0);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix y = random_labels(12, 4, rng);
    // Every bag needs a positive and a negative for the identity to hold.
    for (Index i = 0; i < 12; ++i)
      if (y.row(i).sum() == 4) y(i, 0) = 0;
    const Matrix s = uniform(12, 4, rng, 0, 1);
    CHECK(std::abs(ranking_loss(-s, y) - (1.0 - ranking_loss(s, y))) < 1e-12);
  }
}

TEST_CASE("metrics are invariant to a shared row permutation") {
  SeededRng rng(4, 0);
  const Matrix y = random_labels(15, 4, rng), s = uniform(15, 4, rng, 0, 1);
  const Matrix p = random_labels(15, 4, rng, false);
  const auto v = evaluate_predictions(p, s, y);
  const auto w = evaluate_predictions(p.colwise().reverse(), s.colwise().reverse(),
                                      y.colwise().reverse());
  CHECK(v.hamming_loss == w.hamming_loss);
  CHECK(v.one_error == doctest::Approx(w.one_error).epsilon(1e-15));
  CHECK(v.ranking_loss == doctest::Approx(w.ranking_loss).epsilon(1e-15));
  CHECK(v.average_precision == doctest::Approx(w.average_precision).epsilon(1e-15));
}

TEST_CASE("bags a ranking metric cannot score are skipped with a warning") {
  const Matrix s = rows2({{0.9, 0.1}, {0.3, 0.7}});
  const Matrix y = rows2({{0, 0}, {0, 1}});
  testing::WarningCapture warnings;
  CHECK(one_error(s, y) == 0.0);
  CHECK(average_precision(s, y) == 1.0);
  CHECK(!warnings.messages.empty());
  // Nothing scoreable at all.
  CHECK(ranking_loss(s, Matrix::Ones(2, 2)) == 0.0);
  CHECK(average_precision(s, Matrix::Zero(2, 2)) == 1.0);
}

TEST_CASE("fold aggregation laws") {
  std::vector<MetricValues> folds{{0.1, 0.2, 0.3, 0.9}, {0.3, 0.4, 0.1, 0.7}, {0.2, 0.0, 0.2, 0.8}};
  const MetricsReport pop = aggregate_folds(folds);
  CHECK(std::abs(pop.mean.average_precision - 0.8) < 1e-12);
  CHECK(std::abs(pop.mean.hamming_loss - 0.2) < 1e-12);
  CHECK(std::abs(pop.std.average_precision - std::sqrt(0.02 / 3)) < 1e-12);
  const MetricsReport sample = aggregate_folds(folds, true);
  CHECK(std::abs(sample.std.average_precision - std::sqrt(0.02 / 2)) < 1e-12);
  CHECK(aggregate_folds({folds[0]}).std.ranking_loss == 0.0);

  const nlohmann::json j = report_to_json(pop);
  CHECK(j.at("ap").get<double>() == pop.mean.average_precision);
  CHECK(j.at("per_fold").size() == 3);
  CHECK(j.at("std").at("hl").get<double>() == pop.std.hamming_loss);
  CHECK(j.at("std_kind") == "population");
  CHECK(format_report_table(pop).find("AP") != std::string::npos);
}

}  // namespace
}  // namespace bmiml
