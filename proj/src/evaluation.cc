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

#include "bmiml/evaluation.h"

#include <algorithm>
#include <chrono>
#include <numeric>

#include "bmiml/errors.h"
#include "bmiml/logging.h"

namespace bmiml {

namespace {

MetricValues score_part(const MimlDataset& train, const MimlDataset& test,
                        const PipelineConfig& config) {
  const BmimlFit fit = fit_bmiml(train, config);
  const PredictionSet pred = predict_bags(fit.model, test.bags);
  return evaluate_predictions(pred.labels, pred.probabilities,
                              label_matrix(test));
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

std::vector<std::vector<std::size_t>> make_folds(std::size_t n, int folds,
                                                 std::uint64_t seed) {
  require(folds >= 2, ErrorKind::kConfig, "need at least 2 folds");
  require(static_cast<std::size_t>(folds) <= n, ErrorKind::kConfig,
          std::to_string(folds) + " folds requested for " + std::to_string(n) +
              " bags");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  SeededRng rng(seed, streams::kFolds);
  for (std::size_t i = n; i > 1; --i)
    std::swap(order[i - 1], order[rng.uniform_index(i)]);

  const auto f = static_cast<std::size_t>(folds);
  std::vector<std::vector<std::size_t>> out(f);
  std::size_t pos = 0;
  for (std::size_t k = 0; k < f; ++k) {
    const std::size_t size = n / f + (k < n % f ? 1 : 0);
    out[k].assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                  order.begin() + static_cast<std::ptrdiff_t>(pos + size));
    std::sort(out[k].begin(), out[k].end());
    pos += size;
  }
  return out;
}

MetricsReport cross_validate(const MimlDataset& ds, const PipelineConfig& config,
                             int folds, std::uint64_t seed, bool sample_std) {
  const auto start = std::chrono::steady_clock::now();
  config.validate();
  const auto parts = make_folds(ds.bags.size(), folds, seed);
  std::vector<MetricValues> per_fold;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    std::vector<std::size_t> train_idx;
    for (std::size_t j = 0; j < parts.size(); ++j)
      if (j != k) train_idx.insert(train_idx.end(), parts[j].begin(), parts[j].end());
    std::sort(train_idx.begin(), train_idx.end());
    const MimlDataset train = subset(ds, train_idx);
    const MimlDataset test = subset(ds, parts[k]);
    per_fold.push_back(score_part(train, test, config));
  }
  MetricsReport report = aggregate_folds(std::move(per_fold), sample_std);
  report.variant = std::string(variant_name(config.variant));
  report.seconds = seconds_since(start);
  return report;
}

MetricsReport evaluate_split(const MimlDataset& ds, const PipelineConfig& config,
                             SplitFractions fractions, std::uint64_t seed,
                             bool stratified) {
  const auto start = std::chrono::steady_clock::now();
  config.validate();
  const DatasetSplit split = split_dataset(ds, fractions, seed, stratified);
  const MimlDataset train = subset(ds, split.train_indices);
  const MimlDataset test = subset(ds, split.test_indices);
  MetricsReport report = aggregate_folds({score_part(train, test, config)});
  report.split = SplitSizes{split.train_indices.size(),
                            split.validation_indices.size(),
                            split.test_indices.size()};
  report.variant = std::string(variant_name(config.variant));
  report.seconds = seconds_since(start);
  return report;
}

std::vector<MetricsReport> run_ablation(const MimlDataset& ds,
                                        const PipelineConfig& config,
                                        SplitFractions fractions,
                                        std::uint64_t seed, bool stratified) {
  std::vector<MetricsReport> out;
  for (Variant v : {Variant::kAwlel, Variant::kSmipr, Variant::kBmiml}) {
    PipelineConfig c = config;
    c.variant = v;
    out.push_back(evaluate_split(ds, c, fractions, seed, stratified));
  }
  return out;
}

std::vector<MetricsReport> run_ablation_cv(const MimlDataset& ds,
                                           const PipelineConfig& config,
                                           int folds, std::uint64_t seed,
                                           bool sample_std) {
  std::vector<MetricsReport> out;
  for (Variant v : {Variant::kAwlel, Variant::kSmipr, Variant::kBmiml}) {
    PipelineConfig c = config;
    c.variant = v;
    out.push_back(cross_validate(ds, c, folds, seed, sample_std));
  }
  return out;
}

std::string format_ablation_table(const std::vector<MetricsReport>& reports) {
  std::string out;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    std::string t = format_report_table(reports[i]);
    if (i > 0) t = t.substr(t.find('\n') + 1);  // header once
    out += t;
  }
  return out;
}

}  // namespace bmiml
