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

#ifndef BMIML_SMIPR_H_
#define BMIML_SMIPR_H_

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "bmiml/dataset.h"
#include "bmiml/numerics.h"

namespace bmiml {

// Multi-instance probabilistic regression. The input layer is the Hausdorff
// distance from a bag to each of S medoid bags; a fixed mixing layer follows,
// then trainable dense layers ending in K outputs.

// max{ max_a min_b |a - b|, max_b min_a |b - a| } over instance rows.
double hausdorff(const Matrix& a, const Matrix& b);
double hausdorff(const Bag& a, const Bag& b);

// Symmetric N x N matrix of Hausdorff distances with an exact zero diagonal.
Matrix pairwise_bag_distances(std::span<const Bag> bags);

// The member of `members` (indices into `dist`) with the smallest summed
// distance to the other members; ties go to the lowest index.
std::size_t select_medoid(const Matrix& dist,
                          std::span<const std::size_t> members);
// Position of the medoid within `cluster`.
std::size_t select_medoid(std::span<const Bag> cluster);

struct ClusterModel {
  std::vector<std::size_t> medoid_indices;  // into the clustered bags
  std::vector<Bag> medoids;
  std::vector<std::size_t> assignments;     // bag -> cluster
  double within_cluster_cost = 0.0;
  std::vector<double> cost_history;         // after each full iteration
  int iterations = 0;

  std::size_t num_clusters() const { return medoids.size(); }
};

// k-medoids (Lloyd-style) under the Hausdorff distance. Medoids start at S
// distinct seeded picks; each iteration assigns bags to their nearest medoid
// (a medoid always keeps itself) and re-selects medoids. Stops at an
// assignment fixpoint or after max_iters.
ClusterModel cluster_bags(std::span<const Bag> bags, Index num_clusters,
                          std::uint64_t seed, int max_iters);
ClusterModel cluster_from_distances(const Matrix& dist, Index num_clusters,
                                    std::uint64_t seed, int max_iters);

enum class Layer2Rule {
  kComplement,  // w_pq = 0 if p == q else 1
  kIdentity,    // w_pq = 1 if p == q else 0
};

std::string_view layer2_rule_name(Layer2Rule rule);
Layer2Rule parse_layer2_rule(std::string_view name);

struct SmiprConfig {
  int num_clusters = 0;  // 0 picks max(K, ceil(N / 4)) capped at N
  int num_layers = 3;
  std::vector<int> hidden_widths;  // L - 3 widths for layers 3 .. L-1
  // 0 picks 1 / lambda_max of the output layer's Gram matrix at initialization.
  double eta = 0.0;
  int epochs = 20000;
  ActivationKind hidden_activation = ActivationKind::kSigmoid;
  Layer2Rule layer2_weight_rule = Layer2Rule::kComplement;
  std::uint64_t seed = 0;
  int clustering_max_iters = 100;
  // Standardize the fixed layer-2 outputs on the training bags before the
  // first activation. Only used when num_layers > 2.
  bool normalize_distances = true;

  void validate() const;
  Index resolve_num_clusters(Index num_bags, Index num_classes) const;

  friend bool operator==(const SmiprConfig&, const SmiprConfig&) = default;
};

struct SmiprNet {
  std::vector<Bag> medoids;
  Layer2Rule layer2_rule = Layer2Rule::kComplement;
  Matrix layer2;          // fixed, S x K when L = 2 else S x S
  RowVector layer2_mean;  // standardization of layer-2 outputs (L > 2)
  RowVector layer2_scale;
  ActivationKind hidden_activation = ActivationKind::kSigmoid;
  std::vector<Matrix> weights;  // trainable, layers 3 .. L

  Index num_clusters() const { return static_cast<Index>(medoids.size()); }
  Index num_layers() const { return 2 + static_cast<Index>(weights.size()); }
  Index num_outputs() const {
    return weights.empty() ? layer2.cols() : weights.back().cols();
  }
};

Matrix make_layer2_weights(Layer2Rule rule, Index rows, Index cols);

// Builds an untrained net around the given medoids; trainable weights are
// uniform(-1, 1) from the seed, standardization is the identity.
SmiprNet make_smipr_net(std::vector<Bag> medoids, Index num_classes,
                        const SmiprConfig& config);

// Distances from each bag to each medoid: N x S.
Matrix medoid_distances(const SmiprNet& net, std::span<const Bag> bags);

// Forward pass from precomputed medoid distances (N x S) to N x K scores.
Matrix forward_from_distances(const SmiprNet& net, const Matrix& distances);

RowVector smipr_forward(const SmiprNet& net, const Bag& bag);
Matrix smipr_forward(const SmiprNet& net, std::span<const Bag> bags);

// 1/2 sum_i sum_q (g_q(X_i) - t_iq)^2
double sse_loss(const SmiprNet& net, std::span<const Bag> bags,
                const Matrix& targets);
double sse_loss_from_distances(const SmiprNet& net, const Matrix& distances,
                               const Matrix& targets);

// dE/dW for every trainable layer, summed over all bags.
std::vector<Matrix> sse_gradient(const SmiprNet& net, const Matrix& distances,
                                 const Matrix& targets);

// One full-batch gradient-descent step W <- W - eta dE/dW. The fixed layer-2
// weights are never touched.
SmiprNet smipr_train_epoch(const SmiprNet& net, std::span<const Bag> bags,
                           const Matrix& targets, double eta);
SmiprNet train_epoch_from_distances(const SmiprNet& net,
                                    const Matrix& distances,
                                    const Matrix& targets, double eta);

struct SmiprFit {
  SmiprNet net;
  ClusterModel clusters;
  std::vector<double> loss_history;  // E before training, then after each epoch
  double eta = 0.0;                  // step size actually used
};

SmiprFit fit_smipr(std::span<const Bag> bags, const Matrix& targets,
                   const SmiprConfig& config);

}  // namespace bmiml

#endif  // BMIML_SMIPR_H_
