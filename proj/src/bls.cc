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

#include "bmiml/bls.h"

#include <cmath>
#include <string>

#include "bmiml/errors.h"

namespace bmiml {

void BlsConfig::validate() const {
  require(m1 >= 1 && k1 >= 1 && m2 >= 1 && k2 >= 1, ErrorKind::kConfig,
          "bls: m1, k1, m2, k2 must all be >= 1");
  require(lambda >= 0.0 && std::isfinite(lambda), ErrorKind::kConfig,
          "bls: lambda must be finite and >= 0");
}

ColumnScaler ColumnScaler::identity(Index dim) {
  return {RowVector::Zero(dim), RowVector::Ones(dim)};
}

ColumnScaler ColumnScaler::fit(const Matrix& x) {
  require(x.rows() >= 1, ErrorKind::kInvalidArgument,
          "cannot fit a scaler on zero rows");
  ColumnScaler s;
  s.mean = x.colwise().mean();
  s.scale.resize(x.cols());
  for (Index c = 0; c < x.cols(); ++c) {
    const double var =
        (x.col(c).array() - s.mean(c)).square().sum() / static_cast<double>(x.rows());
    const double sd = std::sqrt(var);
    s.scale(c) = sd > 1e-12 ? sd : 1.0;
  }
  return s;
}

Matrix ColumnScaler::apply(const Matrix& x) const {
  require(x.cols() == mean.size(), ErrorKind::kDimensionMismatch,
          "input has " + std::to_string(x.cols()) + " columns, scaler expects " +
              std::to_string(mean.size()));
  Matrix out = x;
  out.rowwise() -= mean;
  out.array().rowwise() /= scale.array();
  return out;
}

BlsFeatureMap fit_feature_map(Index input_dim, const BlsConfig& config) {
  config.validate();
  require(input_dim >= 1, ErrorKind::kInvalidArgument,
          "bls: input dimension must be >= 1");
  BlsFeatureMap map;
  map.config = config;
  map.input_dim = input_dim;
  map.scaler = ColumnScaler::identity(input_dim);

  const SeededRng feature_rng(config.seed, streams::kFeatureWeights);
  for (int g = 0; g < config.m1; ++g) {
    SeededRng rng = feature_rng.split(static_cast<std::uint64_t>(g));
    map.feature_weights.push_back(random_matrix(input_dim, config.k1, rng));
    map.feature_biases.push_back(random_matrix(1, config.k1, rng).row(0));
  }
  const SeededRng enhancement_rng(config.seed, streams::kEnhancementWeights);
  for (int g = 0; g < config.m2; ++g) {
    SeededRng rng = enhancement_rng.split(static_cast<std::uint64_t>(g));
    map.enhancement_weights.push_back(
        random_matrix(config.feature_width(), config.k2, rng));
    map.enhancement_biases.push_back(random_matrix(1, config.k2, rng).row(0));
  }
  return map;
}

MappedNodes map_nodes(const BlsFeatureMap& map, const Matrix& x) {
  require(x.cols() == map.input_dim, ErrorKind::kDimensionMismatch,
          "bls: input has " + std::to_string(x.cols()) +
              " columns, feature map expects " + std::to_string(map.input_dim));
  const BlsConfig& cfg = map.config;
  MappedNodes out;
  out.scaled_input = map.scaler.apply(x);
  out.z.resize(x.rows(), cfg.feature_width());
  for (int g = 0; g < cfg.m1; ++g) {
    Matrix pre = out.scaled_input * map.feature_weights[g];
    pre.rowwise() += map.feature_biases[g];
    out.z.middleCols(static_cast<Index>(g) * cfg.k1, cfg.k1) =
        apply_activation(pre, cfg.feature_activation);
  }
  out.h.resize(x.rows(), cfg.enhancement_width());
  for (int g = 0; g < cfg.m2; ++g) {
    Matrix pre = out.z * map.enhancement_weights[g];
    pre.rowwise() += map.enhancement_biases[g];
    out.h.middleCols(static_cast<Index>(g) * cfg.k2, cfg.k2) =
        apply_activation(pre, cfg.enhancement_activation);
  }
  return out;
}

Matrix transform(const BlsFeatureMap& map, const Matrix& x) {
  MappedNodes nodes = map_nodes(map, x);
  Matrix a(x.rows(), nodes.z.cols() + nodes.h.cols());
  a << nodes.z, nodes.h;
  return a;
}

BlsModel bls_train(const Matrix& x, const Matrix& y, const BlsConfig& config) {
  require(x.rows() == y.rows(), ErrorKind::kDimensionMismatch,
          "bls_train: X has " + std::to_string(x.rows()) + " rows, Y has " +
              std::to_string(y.rows()));
  BlsModel model;
  model.map = fit_feature_map(x.cols(), config);
  if (config.standardize) model.map.scaler = ColumnScaler::fit(x);
  model.weights = ridge_solve(transform(model.map, x), y, config.lambda);
  return model;
}

Matrix bls_predict(const BlsFeatureMap& map, const Matrix& weights,
                   const Matrix& x) {
  const Matrix a = transform(map, x);
  require(weights.rows() == a.cols(), ErrorKind::kDimensionMismatch,
          "bls_predict: weight rows " + std::to_string(weights.rows()) +
              " != design width " + std::to_string(a.cols()));
  return a * weights;
}

}  // namespace bmiml
