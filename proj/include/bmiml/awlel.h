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

#ifndef BMIML_AWLEL_H_
#define BMIML_AWLEL_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "bmiml/bls.h"
#include "bmiml/numerics.h"

namespace bmiml {

// Auto-weighted label enhancement: a broad network whose regression targets
// T are learned jointly with the output weights, with per-sample weights
// gamma (fit residual) and omega (distance of T from the true labels).

struct AwlelConfig {
  double lambda = 0.1;
  double vartheta = 1.0;
  int max_iters = 50;
  double tol = 1e-5;
  double eps_floor = 1e-8;
  ActivationKind retarget_activation = ActivationKind::kTribas;
  bool include_raw_features = true;

  void validate() const;

  friend bool operator==(const AwlelConfig&, const AwlelConfig&) = default;
};

// Bias and activation of the retargeting nodes. Their width equals the
// label count K.
struct RetargetProjection {
  ActivationKind activation = ActivationKind::kTribas;
  RowVector bias;

  Index width() const { return bias.size(); }
};

RetargetProjection make_retarget_projection(Index width,
                                            ActivationKind activation,
                                            std::uint64_t seed);

// Retargeting nodes act(X wz + Z wh + bias). X wz and Z wh come out k1 and
// k2 wide per group; each term is averaged over its groups and then
// zero-padded or truncated to the projection width.
Matrix build_retarget_nodes(const Matrix& x, const BlsFeatureMap& map,
                            const RetargetProjection& projection);
Matrix build_retarget_nodes(const MappedNodes& nodes, const BlsFeatureMap& map,
                            const RetargetProjection& projection);

// [X | Z | H | R], or [Z | H | R] without raw features.
Matrix build_augmented_design(const Matrix& x, const Matrix& design,
                              const Matrix& retarget, bool include_raw);

struct SampleWeights {
  Vector gamma;
  Vector omega;
};

// gamma_i = 1 / max(eps, |A_i w - T_i|), omega_i = 1 / max(eps, |T_i - Y_i|).
SampleWeights compute_sample_weights(const Matrix& a, const Matrix& wt,
                                     const Matrix& t, const Matrix& y,
                                     double eps_floor);

// Row-wise closed form T_i = (gamma_i A_i w + vartheta omega_i Y_i) /
// (gamma_i + vartheta omega_i).
Matrix update_targets(const Matrix& a, const Matrix& wt, const Matrix& y,
                      const Vector& gamma, const Vector& omega,
                      double vartheta);

// sum_i gamma_i |A_i w - T_i|^2 + lambda |w|^2 + vartheta sum_i omega_i |T_i - Y_i|^2
double awlel_objective(const Matrix& a, const Matrix& wt, const Matrix& t,
                       const Matrix& y, const Vector& gamma,
                       const Vector& omega, double lambda, double vartheta);

// Objective values around one (w, T) update, all under the same weights.
struct AwlelStep {
  double before = 0.0;
  double after_w = 0.0;
  double after_t = 0.0;
  double delta_t = 0.0;  // |T_new - T_old|_F / |T_old|_F
};

struct AwlelState {
  Matrix t;
  Matrix wt;
  Vector gamma;
  Vector omega;
  // Two entries per iteration: after the w update and after the T update.
  std::vector<double> objective_history;
  std::vector<AwlelStep> steps;
  int iterations = 0;
  bool converged = false;
  double final_residual = 0.0;  // |A w - T|_F at exit
};

struct AwlelModel {
  BlsFeatureMap bls_map;
  RetargetProjection retarget;
  Matrix wt;
  double t_min = 0.0;
  double t_max = 1.0;
  AwlelConfig config;
};

struct AwlelFit {
  AwlelModel model;
  AwlelState state;
};

// Alternates w <- weighted ridge, T <- closed form, then refreshes
// (gamma, omega) until the relative change of T drops below tol or max_iters
// is reached. `initial_gamma` replaces the all-ones start for gamma.
AwlelFit fit_awlel(const Matrix& x, const Matrix& y, const BlsConfig& bls,
                   const AwlelConfig& config,
                   const std::optional<Vector>& initial_gamma = std::nullopt);

// The augmented design for new inputs under the frozen maps.
Matrix awlel_design(const AwlelModel& model, const Matrix& x);
Matrix awlel_predict_scores(const AwlelModel& model, const Matrix& x);

}  // namespace bmiml

#endif  // BMIML_AWLEL_H_
