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

#ifndef BMIML_EVALUATION_H_
#define BMIML_EVALUATION_H_

#include <cstdint>
#include <string>
#include <vector>

#include "bmiml/dataset.h"
#include "bmiml/metrics.h"
#include "bmiml/pipeline.h"

namespace bmiml {

// Seeded partition of 0..n-1 into `folds` sorted index lists whose sizes
// differ by at most one.
std::vector<std::vector<std::size_t>> make_folds(std::size_t n, int folds,
                                                 std::uint64_t seed);

// k-fold cross-validation of `config.variant`; every fold trains with the
// same stage seeds.
MetricsReport cross_validate(const MimlDataset& ds, const PipelineConfig& config,
                             int folds, std::uint64_t seed,
                             bool sample_std = false);

// Train on the train part of a seeded split, score the test part. The
// validation part is carved out (and reported) but not used for fitting.
MetricsReport evaluate_split(const MimlDataset& ds, const PipelineConfig& config,
                             SplitFractions fractions, std::uint64_t seed,
                             bool stratified = false);

// The three variants on the same split, in the order AWLEL, SMIPR, BMIML.
std::vector<MetricsReport> run_ablation(const MimlDataset& ds,
                                        const PipelineConfig& config,
                                        SplitFractions fractions,
                                        std::uint64_t seed,
                                        bool stratified = false);
// Same, over cross-validation folds.
std::vector<MetricsReport> run_ablation_cv(const MimlDataset& ds,
                                           const PipelineConfig& config,
                                           int folds, std::uint64_t seed,
                                           bool sample_std = false);

std::string format_ablation_table(const std::vector<MetricsReport>& reports);

}  // namespace bmiml

#endif  // BMIML_EVALUATION_H_
