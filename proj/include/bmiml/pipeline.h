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

#ifndef BMIML_PIPELINE_H_
#define BMIML_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bmiml/awlel.h"
#include "bmiml/bls.h"
#include "bmiml/dataset.h"
#include "bmiml/smipr.h"

namespace bmiml {

// Which stages a model uses. kBmiml is the full pipeline; the other two are
// the single-stage ablations.
enum class Variant { kAwlel, kSmipr, kBmiml };

std::string_view variant_name(Variant v);
Variant parse_variant(std::string_view name);

// How a bag is reduced to one vector for the label-enhancement stage.
enum class GlobalView { kMean, kMax, kConcat };

std::string_view global_view_name(GlobalView v);
GlobalView parse_global_view(std::string_view name);

struct PipelineConfig {
  BlsConfig bls;
  AwlelConfig awlel;
  SmiprConfig smipr;
  // One threshold per class, or a single value applied to every class.
  std::vector<double> tau = {0.8};
  std::uint64_t seed = 0;
  GlobalView global_view = GlobalView::kMean;
  Variant variant = Variant::kBmiml;
  bool force_top1 = false;
  // Experimental: extra AWLEL refits weighted by SMIPR residuals.
  int outer_rounds = 1;

  void validate() const;
  // Thresholds expanded to K entries.
  std::vector<double> resolve_tau(Index num_classes) const;
  // Propagates `seed` into every stage config.
  void set_seed(std::uint64_t s);

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

inline constexpr std::uint32_t kModelFormatVersion = 1;

struct BmimlModel {
  std::uint32_t format_version = kModelFormatVersion;
  PipelineConfig config;
  Index instance_dim = 0;
  Index num_classes = 0;
  Index global_dim = 0;  // width of the global-view vector
  std::optional<AwlelModel> awlel;  // absent for the SMIPR-only variant
  std::optional<SmiprNet> smipr;    // absent for the AWLEL-only variant
  double t_min = 0.0;
  double t_max = 1.0;
};

struct PredictionSet {
  std::vector<std::string> bag_ids;
  Matrix raw_scores;     // clipped
  Matrix probabilities;  // row softmax
  Matrix labels;         // 0/1 decisions
};

// One row per bag: mean or max over instances, or all instances laid end to
// end (needs a uniform instance count).
Matrix global_view(std::span<const Bag> bags, GlobalView view);

Matrix clip_scores(const Matrix& scores, double t_min, double t_max);

// 1 where p_c > tau_c (strict).
std::vector<std::uint8_t> decide(const Vector& probabilities,
                                 std::span<const double> tau);

struct BmimlFit {
  BmimlModel model;
  std::optional<AwlelState> awlel_state;  // of the last AWLEL refit
  Matrix smipr_targets;                   // the T handed to SMIPR
  std::vector<double> smipr_loss;
  double smipr_eta = 0.0;  // resolved step size
};

BmimlFit fit_bmiml(const MimlDataset& train, const PipelineConfig& config);

struct PredictOptions {
  std::optional<std::vector<double>> tau;  // overrides the stored thresholds
  std::optional<bool> force_top1;
};

// Scores before clipping.
Matrix raw_model_scores(const BmimlModel& model, std::span<const Bag> bags);

PredictionSet predict_bags(const BmimlModel& model, std::span<const Bag> bags,
                           const PredictOptions& options = {});

std::string serialize_model(const BmimlModel& model);
BmimlModel deserialize_model(std::string_view bytes);
void save_model(const BmimlModel& model, const std::filesystem::path& path);
BmimlModel load_model(const std::filesystem::path& path);

}  // namespace bmiml

#endif  // BMIML_PIPELINE_H_
