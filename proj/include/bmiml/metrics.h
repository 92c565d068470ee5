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

#ifndef BMIML_METRICS_H_
#define BMIML_METRICS_H_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bmiml/numerics.h"

namespace bmiml {

// Example-based multi-label metrics. Scores and labels are N x K; labels are
// 0/1. Bags a ranking metric cannot score (no positive, or for ranking loss
// no negative) are skipped with a warning; if every bag is skipped the loss
// metrics return 0 and average precision returns 1.

// Fraction of mismatched (bag, class) cells.
double hamming_loss(const Matrix& predicted, const Matrix& truth);

// Fraction of bags whose top-scored class (lowest index on ties) is not a
// true label.
double one_error(const Matrix& scores, const Matrix& truth);

// Mean fraction of (positive, negative) pairs ordered wrongly; ties count 1/2.
double ranking_loss(const Matrix& scores, const Matrix& truth);

// Mean over bags of the mean precision at each true label's rank. Ranks
// sort by descending score with ties going to the lower class index.
double average_precision(const Matrix& scores, const Matrix& truth);

struct MetricValues {
  double hamming_loss = 0.0;
  double one_error = 0.0;
  double ranking_loss = 0.0;
  double average_precision = 0.0;
};

// All four metrics: hamming loss on hard labels, the rest on scores.
MetricValues evaluate_predictions(const Matrix& predicted_labels,
                                  const Matrix& scores, const Matrix& truth);

struct SplitSizes {
  std::size_t train = 0;
  std::size_t validation = 0;
  std::size_t test = 0;
};

struct MetricsReport {
  std::vector<MetricValues> per_fold;
  MetricValues mean;
  MetricValues std;
  bool sample_std = false;
  std::optional<SplitSizes> split;
  std::string variant;
  double seconds = 0.0;  // wall clock, informational only
};

// Mean and standard deviation (population unless `sample_std`) per metric.
MetricsReport aggregate_folds(std::vector<MetricValues> per_fold,
                              bool sample_std = false);

// {"hl":…, "oe":…, "rl":…, "ap":…, "std":{…}, "per_fold":[…]}; the wall
// clock is left out so repeated runs serialize identically.
nlohmann::json report_to_json(const MetricsReport& report);
std::string format_report_table(const MetricsReport& report);

}  // namespace bmiml

#endif  // BMIML_METRICS_H_
