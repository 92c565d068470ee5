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
#include <cstring>
#include <filesystem>

#include "bmiml/binary_io.h"
#include "bmiml/evaluation.h"
#include "bmiml/pipeline.h"
#include "test_util.h"

namespace bmiml {
namespace {

using testing::thrown_kind;
using testing::uniform;

MimlDataset small_synthetic(std::uint64_t seed, Index bags = 40, double noise = 0.1) {
  SyntheticSpec spec;
  spec.num_bags = bags;
  spec.noise_std = noise;
  spec.seed = seed;
  return generate_synthetic(spec);
}

// Keeps unit tests quick; the acceptance binary runs the defaults.
PipelineConfig quick_config(Variant v = Variant::kBmiml) {
  PipelineConfig c;
  c.variant = v;
  c.bls.m1 = 4;
  c.bls.k1 = 5;
  c.bls.m2 = 2;
  c.bls.k2 = 20;
  c.smipr.epochs = 300;
  c.set_seed(3);
  return c;
}

TEST_CASE("clipping clamps into the target range and leaves inside entries alone") {
  SeededRng rng(1, 0);
  const Matrix s = uniform(20, 4, rng, -2, 2);
  const Matrix c = clip_scores(s, -0.5, 1.0);
  for (Index i = 0; i < s.rows(); ++i)
    for (Index k = 0; k < s.cols(); ++k) {
      CHECK(c(i, k) >= -0.5);
      CHECK(c(i, k) <= 1.0);
      if (s(i, k) >= -0.5 && s(i, k) <= 1.0) CHECK(c(i, k) == s(i, k));
    }
  CHECK(clip_scores(Matrix::Constant(1, 1, -3.0), 0.0, 1.0)(0, 0) == 0.0);
  // Argmax survives clipping when the max was inside the range.
  for (Index i = 0; i < s.rows(); ++i) {
    Index a, b;
    const double top = s.row(i).maxCoeff(&a);
    if (top > 1.0 || top < -0.5) continue;
    c.row(i).maxCoeff(&b);
    CHECK(a == b);
  }
  CHECK(thrown_kind([] { clip_scores(Matrix::Zero(1, 1), 1.0, 0.0); }) ==
        ErrorKind::kInvalidArgument);
}

TEST_CASE("decision rule is a strict per-class threshold") {
  Vector p(2);
  p << 0.9, 0.1;
  const std::vector<double> tau{0.8, 0.8};
  CHECK(decide(p, tau) == std::vector<std::uint8_t>{1, 0});
  p << 0.8, 0.2;
  CHECK(decide(p, tau) == std::vector<std::uint8_t>{0, 0});
  for (Index k : {2, 3, 7}) {
    const std::vector<double> t(static_cast<std::size_t>(k), 0.8);
    const auto out = decide(Vector::Constant(k, 1.0 / static_cast<double>(k)), t);
    CHECK(std::count(out.begin(), out.end(), 1) == 0);
  }
  // Raising a class threshold never adds positives for it.
  SeededRng rng(2, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const Vector q = softmax(uniform(4, 1, rng, -3, 3).col(0));
    std::vector<double> lo(4), hi(4);
    for (int c = 0; c < 4; ++c) {
      lo[c] = rng.uniform(0.01, 0.99);
      hi[c] = std::min(0.99, lo[c] + rng.uniform(0, 0.5));
    }
    const auto a = decide(q, lo), b = decide(q, hi);
    for (int c = 0; c < 4; ++c) CHECK(b[c] <= a[c]);
  }
}

TEST_CASE("threshold configuration") {
  PipelineConfig c;
  CHECK(c.resolve_tau(3) == std::vector<double>{0.8, 0.8, 0.8});
  c.tau = {0.5, 0.6};
  CHECK(c.resolve_tau(2) == std::vector<double>{0.5, 0.6});
  CHECK(thrown_kind([&] { c.resolve_tau(3); }) == ErrorKind::kConfig);
  c.tau = {1.0};
  CHECK(thrown_kind([&] { c.validate(); }) == ErrorKind::kConfig);
  c.tau = {0.0};
  CHECK(thrown_kind([&] { c.validate(); }) == ErrorKind::kConfig);
}

TEST_CASE("global views") {
  SeededRng rng(3, 0);
  std::vector<Bag> bags{testing::random_bag("a", 3, 2, 2, rng),
                        testing::random_bag("b", 3, 2, 2, rng)};
  const Matrix mean = global_view(bags, GlobalView::kMean);
  CHECK((mean.row(1) - bags[1].instances.colwise().mean()).norm() < 1e-15);
  CHECK(global_view(bags, GlobalView::kMax).row(0) == bags[0].instances.colwise().maxCoeff());
  const Matrix cat = global_view(bags, GlobalView::kConcat);
  CHECK(cat.cols() == 6);
  CHECK(cat(0, 2) == bags[0].instances(1, 0));
  bags.push_back(testing::random_bag("c", 2, 2, 2, rng));
  CHECK(thrown_kind([&] { global_view(bags, GlobalView::kConcat); }) ==
        ErrorKind::kDimensionMismatch);
}

TEST_CASE("predictions are normalized, consistent with thresholds, and pure") {
  const MimlDataset ds = small_synthetic(4);
  const BmimlFit fit = fit_bmiml(ds, quick_config());
  const PredictionSet p = predict_bags(fit.model, ds.bags);
  REQUIRE(p.probabilities.rows() == 40);
  for (Index i = 0; i < 40; ++i) {
    CHECK(std::abs(p.probabilities.row(i).sum() - 1.0) <= 1e-12);
    for (Index k = 0; k < p.labels.cols(); ++k)
      CHECK(p.labels(i, k) == (p.probabilities(i, k) > 0.8 ? 1.0 : 0.0));
    CHECK(p.raw_scores.row(i).minCoeff() >= fit.model.t_min);
    CHECK(p.raw_scores.row(i).maxCoeff() <= fit.model.t_max);
  }
  const PredictionSet again = predict_bags(fit.model, ds.bags);
  CHECK(again.probabilities == p.probabilities);
  CHECK(again.labels == p.labels);
  CHECK(p.bag_ids.front() == ds.bags.front().id);

  const PredictionSet low = predict_bags(fit.model, ds.bags, {std::vector<double>{0.2}, {}});
  CHECK(low.labels.sum() >= p.labels.sum());
  const PredictionSet top = predict_bags(fit.model, ds.bags, {{}, true});
  for (Index i = 0; i < 40; ++i) {
    CHECK(top.labels.row(i).sum() >= 1.0);
    Index best;
    p.probabilities.row(i).maxCoeff(&best);
    CHECK(top.labels(i, best) == 1.0);
  }

  std::vector<Bag> wrong{ds.bags[0]};
  wrong[0].instances = Matrix::Zero(2, 3);
  CHECK(thrown_kind([&] { predict_bags(fit.model, wrong); }) == ErrorKind::kDimensionMismatch);
}

TEST_CASE("with thresholds of one half or more each bag gets at most one label") {
  // Softmax mass above one half can sit on one class only, so hamming loss is
  // bounded below by the surplus label cardinality of the data.
  const MimlDataset ds = small_synthetic(5, 40, 0.0);
  const BmimlFit fit = fit_bmiml(ds, quick_config());
  const PredictionSet p = predict_bags(fit.model, ds.bags, {std::vector<double>{0.5}, {}});
  const Matrix y = label_matrix(ds);
  double surplus = 0;
  for (Index i = 0; i < y.rows(); ++i) {
    CHECK(p.labels.row(i).sum() <= 1.0);
    surplus += std::max(0.0, y.row(i).sum() - 1.0);
  }
  CHECK(hamming_loss(p.labels, y) >= surplus / static_cast<double>(y.size()));
}

TEST_CASE("the regression stage trains on exactly the enhanced targets") {
  const MimlDataset ds = small_synthetic(6);
  for (int rounds : {1, 2}) {
    PipelineConfig cfg = quick_config();
    cfg.outer_rounds = rounds;
    const BmimlFit fit = fit_bmiml(ds, cfg);
    REQUIRE(fit.awlel_state.has_value());
    CHECK(fit.smipr_targets == fit.awlel_state->t);
    CHECK(fit.model.t_min == fit.awlel_state->t.minCoeff());
    CHECK(fit.model.t_max == fit.awlel_state->t.maxCoeff());
    CHECK(fit.smipr_eta > 0.0);
  }
  const BmimlFit alone = fit_bmiml(ds, quick_config(Variant::kSmipr));
  CHECK(alone.smipr_targets == label_matrix(ds));
  CHECK_FALSE(alone.model.awlel.has_value());
  CHECK(alone.model.t_min == 0.0);
  CHECK(alone.model.t_max == 1.0);
  const BmimlFit enhance = fit_bmiml(ds, quick_config(Variant::kAwlel));
  CHECK_FALSE(enhance.model.smipr.has_value());
  CHECK(predict_bags(enhance.model, ds.bags).probabilities.rows() == 40);
}

TEST_CASE("too many clusters is a configuration error before training") {
  const MimlDataset ds = small_synthetic(7, 10);
  PipelineConfig cfg = quick_config();
  cfg.smipr.num_clusters = 11;
  std::string msg;
  CHECK(thrown_kind([&] { fit_bmiml(ds, cfg); }, &msg) == ErrorKind::kConfig);
  CHECK(msg.find("11") != std::string::npos);
}

TEST_CASE("noiseless training data is ranked almost perfectly") {
  SyntheticSpec spec;
  spec.noise_std = 0.0;
  spec.seed = 8;
  const MimlDataset ds = generate_synthetic(spec);
  PipelineConfig cfg;
  cfg.set_seed(8);
  const BmimlFit fit = fit_bmiml(ds, cfg);
  const PredictionSet p = predict_bags(fit.model, ds.bags);
  CHECK(average_precision(p.probabilities, label_matrix(ds)) >= 0.95);
}

TEST_CASE("model files round trip to bitwise-equal predictions") {
  const MimlDataset ds = small_synthetic(9);
  for (Variant v : {Variant::kAwlel, Variant::kSmipr, Variant::kBmiml}) {
    const BmimlFit fit = fit_bmiml(ds, quick_config(v));
    const std::string bytes = serialize_model(fit.model);
    const BmimlModel back = deserialize_model(bytes);
    CHECK(serialize_model(back) == bytes);
    CHECK(back.config == fit.model.config);
    const PredictionSet a = predict_bags(fit.model, ds.bags), b = predict_bags(back, ds.bags);
    CHECK(a.raw_scores == b.raw_scores);
    CHECK(a.probabilities == b.probabilities);
    CHECK(a.labels == b.labels);
  }
  const auto path = std::filesystem::temp_directory_path() / "bmiml_pipeline_test.bmml";
  const BmimlFit fit = fit_bmiml(ds, quick_config());
  save_model(fit.model, path);
  CHECK(serialize_model(load_model(path)) == serialize_model(fit.model));
  std::filesystem::remove(path);
  CHECK(thrown_kind([&] { load_model(path); }) == ErrorKind::kIo);
}

TEST_CASE("same seed gives the same model bytes; another seed does not") {
  const MimlDataset ds = small_synthetic(10);
  const std::string a = serialize_model(fit_bmiml(ds, quick_config()).model);
  CHECK(serialize_model(fit_bmiml(ds, quick_config()).model) == a);
  PipelineConfig other = quick_config();
  other.set_seed(4);
  CHECK(serialize_model(fit_bmiml(ds, other).model) != a);
}

TEST_CASE("damaged model files are rejected") {
  const MimlDataset ds = small_synthetic(11, 20);
  const std::string bytes = serialize_model(fit_bmiml(ds, quick_config()).model);
  std::string msg;
  CHECK(thrown_kind([&] { deserialize_model(bytes.substr(0, bytes.size() / 2)); }) ==
        ErrorKind::kCorrupt);
  CHECK(thrown_kind([&] { deserialize_model(bytes.substr(0, 5)); }) == ErrorKind::kCorrupt);
  std::string flipped = bytes;
  flipped[bytes.size() / 2] ^= 0x40;
  CHECK(thrown_kind([&] { deserialize_model(flipped); }, &msg) == ErrorKind::kCorrupt);
  std::string magic = bytes;
  magic[0] = 'X';
  CHECK(thrown_kind([&] { deserialize_model(magic); }) == ErrorKind::kCorrupt);
  CHECK(thrown_kind([&] { deserialize_model(bytes + "tail"); }) == ErrorKind::kCorrupt);
  for (std::uint32_t version : {0u, 2u}) {
    std::string old = bytes;
    std::memcpy(old.data() + 6, &version, sizeof(version));
    CHECK(thrown_kind([&] { deserialize_model(old); }, &msg) == ErrorKind::kUnsupportedVersion);
    CHECK(msg.find(std::to_string(version)) != std::string::npos);
  }
}

TEST_CASE("folds partition the bags and are seeded") {
  const auto folds = make_folds(23, 5, 1);
  REQUIRE(folds.size() == 5);
  std::vector<int> seen(23, 0);
  for (const auto& f : folds) {
    CHECK((f.size() == 4 || f.size() == 5));
    CHECK(std::is_sorted(f.begin(), f.end()));
    for (std::size_t i : f) ++seen[i];
  }
  CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
  CHECK(make_folds(23, 5, 1) == folds);
  CHECK(make_folds(23, 5, 2) != folds);
  CHECK(thrown_kind([] { make_folds(4, 5, 0); }) == ErrorKind::kConfig);
  CHECK(thrown_kind([] { make_folds(4, 1, 0); }) == ErrorKind::kConfig);
}

TEST_CASE("cross-validation is deterministic and aggregates its folds") {
  const MimlDataset ds = small_synthetic(12, 30);
  testing::WarningCapture quiet;
  const MetricsReport a = cross_validate(ds, quick_config(), 3, 5);
  const MetricsReport b = cross_validate(ds, quick_config(), 3, 5);
  CHECK(report_to_json(a) == report_to_json(b));
  REQUIRE(a.per_fold.size() == 3);
  double ap = 0;
  for (const auto& f : a.per_fold) ap += f.average_precision;
  CHECK(std::abs(a.mean.average_precision - ap / 3) <= 1e-12);
}

TEST_CASE("leave-one-out cross-validation runs on tiny data") {
  const MimlDataset ds = small_synthetic(13, 6);
  PipelineConfig cfg = quick_config();
  cfg.smipr.num_clusters = 2;
  testing::WarningCapture quiet;
  const MetricsReport r = cross_validate(ds, cfg, 6, 1);
  CHECK(r.per_fold.size() == 6);
}

TEST_CASE("split evaluation reports its sizes; ablation covers the three variants") {
  const MimlDataset ds = small_synthetic(14, 30);
  testing::WarningCapture quiet;
  const MetricsReport r = evaluate_split(ds, quick_config(), SplitFractions{}, 2);
  REQUIRE(r.split.has_value());
  CHECK(r.split->train == 18);
  CHECK(r.split->validation == 3);
  CHECK(r.split->test == 9);
  const auto ab = run_ablation(ds, quick_config(), SplitFractions{}, 2);
  REQUIRE(ab.size() == 3);
  CHECK(ab[0].variant == "awlel");
  CHECK(ab[1].variant == "smipr");
  CHECK(ab[2].variant == "bmiml");
  CHECK(report_to_json(ab[2]).at("ap") == report_to_json(r).at("ap"));
  const std::string table = format_ablation_table(ab);
  CHECK(table.find("smipr") != std::string::npos);
}

TEST_CASE("variant and view names round trip") {
  for (Variant v : {Variant::kAwlel, Variant::kSmipr, Variant::kBmiml})
    CHECK(parse_variant(variant_name(v)) == v);
  for (GlobalView v : {GlobalView::kMean, GlobalView::kMax, GlobalView::kConcat})
    CHECK(parse_global_view(global_view_name(v)) == v);
  CHECK(thrown_kind([] { parse_variant("both"); }) == ErrorKind::kConfig);
}

}  // namespace
}  // namespace bmiml
