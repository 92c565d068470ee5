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

#ifndef BMIML_BLS_H_
#define BMIML_BLS_H_

#include <cstdint>
#include <vector>

#include "bmiml/numerics.h"

namespace bmiml {

struct BlsConfig {
  int m1 = 10;  // feature-node groups
  int k1 = 10;  // nodes per feature group
  int m2 = 10;  // enhancement groups
  int k2 = 100;  // nodes per enhancement group
  ActivationKind feature_activation = ActivationKind::kSigmoid;
  ActivationKind enhancement_activation = ActivationKind::kTanh;
  double lambda = 0.1;
  // Per-column standardization of the input, fitted on training data.
  bool standardize = true;
  std::uint64_t seed = 0;

  void validate() const;
  Index feature_width() const { return static_cast<Index>(m1) * k1; }
  Index enhancement_width() const { return static_cast<Index>(m2) * k2; }
  Index design_width() const { return feature_width() + enhancement_width(); }

  friend bool operator==(const BlsConfig&, const BlsConfig&) = default;
};

// Affine column map x -> (x - mean) / scale. Columns with zero spread keep
// scale 1.
struct ColumnScaler {
  RowVector mean;
  RowVector scale;

  static ColumnScaler identity(Index dim);
  static ColumnScaler fit(const Matrix& x);
  Matrix apply(const Matrix& x) const;
};

// Frozen random weights of the feature and enhancement node groups.
struct BlsFeatureMap {
  BlsConfig config;
  Index input_dim = 0;
  ColumnScaler scaler;
  std::vector<Matrix> feature_weights;       // m1 of D x k1
  std::vector<RowVector> feature_biases;     // m1 of 1 x k1
  std::vector<Matrix> enhancement_weights;   // m2 of (m1 k1) x k2
  std::vector<RowVector> enhancement_biases; // m2 of 1 x k2
};

BlsFeatureMap fit_feature_map(Index input_dim, const BlsConfig& config);

struct MappedNodes {
  Matrix scaled_input;  // X after the map's scaler
  Matrix z;             // [Z_1 ... Z_m1]
  Matrix h;             // [H_1 ... H_m2]
};

MappedNodes map_nodes(const BlsFeatureMap& map, const Matrix& x);

// Design matrix [Z_1 ... Z_m1 | H_1 ... H_m2], one row per input row.
Matrix transform(const BlsFeatureMap& map, const Matrix& x);

struct BlsModel {
  BlsFeatureMap map;
  Matrix weights;  // design_width x K
};

BlsModel bls_train(const Matrix& x, const Matrix& y, const BlsConfig& config);
Matrix bls_predict(const BlsFeatureMap& map, const Matrix& weights,
                   const Matrix& x);

}  // namespace bmiml

#endif  // BMIML_BLS_H_
