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

#include "bmiml/smipr.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "bmiml/errors.h"
#include "bmiml/logging.h"
#include "bmiml/parallel.h"

namespace bmiml {

namespace {

// max over rows of `from` of the squared distance to the nearest row of `to`.
double directed_sq(const Matrix& from, const Matrix& to) {
  double worst = 0.0;
  for (Index i = 0; i < from.rows(); ++i) {
    double nearest = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < to.rows(); ++j) {
      double s = 0.0;
      for (Index c = 0; c < from.cols(); ++c) {
        const double diff = from(i, c) - to(j, c);
        s += diff * diff;
      }
      if (s < nearest) nearest = s;
    }
    if (nearest > worst) worst = nearest;
  }
  return worst;
}

}  // namespace

double hausdorff(const Matrix& a, const Matrix& b) {
  require(a.rows() >= 1 && b.rows() >= 1, ErrorKind::kInvalidArgument,
          "hausdorff: empty bag");
  require(a.cols() == b.cols(), ErrorKind::kDimensionMismatch,
          "hausdorff: instance dimensions differ (" + std::to_string(a.cols()) +
              " vs " + std::to_string(b.cols()) + ")");
  return std::sqrt(std::max(directed_sq(a, b), directed_sq(b, a)));
}

double hausdorff(const Bag& a, const Bag& b) {
  return hausdorff(a.instances, b.instances);
}

Matrix pairwise_bag_distances(std::span<const Bag> bags) {
  const auto n = static_cast<Index>(bags.size());
  Matrix dist = Matrix::Zero(n, n);
  parallel_for(bags.size(), [&](std::size_t i) {
    for (std::size_t j = i + 1; j < bags.size(); ++j) {
      const double d = hausdorff(bags[i], bags[j]);
      dist(static_cast<Index>(i), static_cast<Index>(j)) = d;
      dist(static_cast<Index>(j), static_cast<Index>(i)) = d;
    }
  });
  return dist;
}

std::size_t select_medoid(const Matrix& dist,
                          std::span<const std::size_t> members) {
  require(!members.empty(), ErrorKind::kInvalidArgument,
          "select_medoid: empty cluster");
  std::vector<std::size_t> sorted(members.begin(), members.end());
  std::sort(sorted.begin(), sorted.end());
  std::size_t best = sorted.front();
  double best_sum = std::numeric_limits<double>::infinity();
  for (std::size_t a : sorted) {
    double sum = 0.0;
    for (std::size_t b : sorted)
      sum += dist(static_cast<Index>(a), static_cast<Index>(b));
    if (sum < best_sum) {
      best_sum = sum;
      best = a;
    }
  }
  return best;
}

std::size_t select_medoid(std::span<const Bag> cluster) {
  require(!cluster.empty(), ErrorKind::kInvalidArgument,
          "select_medoid: empty cluster");
  const Matrix dist = pairwise_bag_distances(cluster);
  std::vector<std::size_t> all(cluster.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return select_medoid(dist, all);
}

namespace {

// k-medoids++ style seeding: first pick uniform, then proportional to the
// squared distance from the nearest pick so far.
std::vector<std::size_t> seed_medoids(const Matrix& dist, std::size_t s,
                                      SeededRng& rng) {
  const auto n = static_cast<std::size_t>(dist.rows());
  std::vector<std::size_t> picks;
  std::vector<bool> taken(n, false);
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  picks.push_back(rng.uniform_index(n));
  taken[picks.back()] = true;
  while (picks.size() < s) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = dist(static_cast<Index>(i), static_cast<Index>(picks.back()));
      nearest[i] = std::min(nearest[i], d * d);
      if (!taken[i]) total += nearest[i];
    }
    std::size_t choice = n;
    if (total > 0.0) {
      double u = rng.uniform01() * total;
      for (std::size_t i = 0; i < n; ++i) {
        if (taken[i]) continue;
        if (u < nearest[i]) {
          choice = i;
          break;
        }
        u -= nearest[i];
      }
    }
    if (choice == n) {
      // Remaining mass is zero (duplicate bags) or rounding ran off the end:
      // take an untaken bag uniformly.
      std::vector<std::size_t> free;
      for (std::size_t i = 0; i < n; ++i)
        if (!taken[i]) free.push_back(i);
      choice = free[rng.uniform_index(free.size())];
    }
    picks.push_back(choice);
    taken[choice] = true;
  }
  return picks;
}

std::vector<std::size_t> assign_to_medoids(
    const Matrix& dist, const std::vector<std::size_t>& medoids) {
  const auto n = static_cast<std::size_t>(dist.rows());
  std::vector<std::size_t> assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < medoids.size(); ++c) {
      if (medoids[c] == i) {
        best = -1.0;
        assign[i] = c;
        break;
      }
      const double d = dist(static_cast<Index>(i), static_cast<Index>(medoids[c]));
      if (d < best) {
        best = d;
        assign[i] = c;
      }
    }
  }
  return assign;
}

// Gives every empty cluster the bag farthest from its own medoid.
void repair_empty_clusters(const Matrix& dist, std::vector<std::size_t>& medoids,
                           std::vector<std::size_t>& assign) {
  for (std::size_t c = 0; c < medoids.size(); ++c) {
    if (std::find(assign.begin(), assign.end(), c) != assign.end()) continue;
    std::size_t far = assign.size();
    double far_d = -1.0;
    for (std::size_t i = 0; i < assign.size(); ++i) {
      if (std::find(medoids.begin(), medoids.end(), i) != medoids.end()) continue;
      const double d = dist(static_cast<Index>(i),
                            static_cast<Index>(medoids[assign[i]]));
      if (d > far_d) {
        far_d = d;
        far = i;
      }
    }
    if (far == assign.size()) continue;
    medoids[c] = far;
    assign[far] = c;
  }
}

double clustering_cost(const Matrix& dist, const std::vector<std::size_t>& medoids,
                       const std::vector<std::size_t>& assign) {
  double cost = 0.0;
  for (std::size_t i = 0; i < assign.size(); ++i)
    cost += dist(static_cast<Index>(i), static_cast<Index>(medoids[assign[i]]));
  return cost;
}

}  // namespace

ClusterModel cluster_from_distances(const Matrix& dist, Index num_clusters,
                                    std::uint64_t seed, int max_iters) {
  const Index n = dist.rows();
  require(dist.cols() == n, ErrorKind::kDimensionMismatch,
          "cluster_from_distances: distance matrix is not square");
  require(num_clusters >= 1, ErrorKind::kConfig,
          "clustering needs at least one cluster");
  require(num_clusters <= n, ErrorKind::kConfig,
          "cannot form " + std::to_string(num_clusters) + " clusters from " +
              std::to_string(n) + " bags");
  require(max_iters >= 1, ErrorKind::kConfig,
          "clustering max_iters must be >= 1");

  SeededRng rng(seed, streams::kClustering);
  std::vector<std::size_t> medoids =
      seed_medoids(dist, static_cast<std::size_t>(num_clusters), rng);
  std::vector<std::size_t> assign = assign_to_medoids(dist, medoids);
  repair_empty_clusters(dist, medoids, assign);

  ClusterModel model;
  for (int it = 0; it < max_iters; ++it) {
    for (std::size_t c = 0; c < medoids.size(); ++c) {
      std::vector<std::size_t> members;
      for (std::size_t i = 0; i < assign.size(); ++i)
        if (assign[i] == c) members.push_back(i);
      medoids[c] = select_medoid(dist, members);
    }
    model.cost_history.push_back(clustering_cost(dist, medoids, assign));
    model.iterations = it + 1;
    std::vector<std::size_t> next = assign_to_medoids(dist, medoids);
    repair_empty_clusters(dist, medoids, next);
    if (next == assign) break;
    assign = std::move(next);
  }
  model.medoid_indices = medoids;
  model.assignments = assign;
  model.within_cluster_cost = clustering_cost(dist, medoids, assign);
  return model;
}

ClusterModel cluster_bags(std::span<const Bag> bags, Index num_clusters,
                          std::uint64_t seed, int max_iters) {
  require(num_clusters <= static_cast<Index>(bags.size()), ErrorKind::kConfig,
          "cannot form " + std::to_string(num_clusters) + " clusters from " +
              std::to_string(bags.size()) + " bags");
  ClusterModel model = cluster_from_distances(pairwise_bag_distances(bags),
                                              num_clusters, seed, max_iters);
  for (std::size_t m : model.medoid_indices) model.medoids.push_back(bags[m]);
  return model;
}

std::string_view layer2_rule_name(Layer2Rule rule) {
  return rule == Layer2Rule::kComplement ? "complement" : "identity";
}

Layer2Rule parse_layer2_rule(std::string_view name) {
  if (name == "paper-complement" || name == "complement")
    return Layer2Rule::kComplement;
  if (name == "identity") return Layer2Rule::kIdentity;
  fail(ErrorKind::kConfig, "unknown layer-2 weight rule '" + std::string(name) +
                               "' (expected complement|identity)");
}

void SmiprConfig::validate() const {
  require(num_clusters >= 0, ErrorKind::kConfig,
          "smipr: num_clusters must be >= 1 (or 0 for automatic)");
  require(num_layers >= 2, ErrorKind::kConfig, "smipr: num_layers must be >= 2");
  const int expected_hidden = std::max(0, num_layers - 3);
  require(static_cast<int>(hidden_widths.size()) == expected_hidden,
          ErrorKind::kConfig,
          "smipr: " + std::to_string(num_layers) + " layers need " +
              std::to_string(expected_hidden) + " hidden widths, got " +
              std::to_string(hidden_widths.size()));
  for (int w : hidden_widths)
    require(w >= 1, ErrorKind::kConfig, "smipr: hidden widths must be >= 1");
  require(eta >= 0.0 && std::isfinite(eta), ErrorKind::kConfig,
          "smipr: eta must be > 0 (or 0 for automatic)");
  require(epochs >= 0, ErrorKind::kConfig, "smipr: epochs must be >= 0");
  require(clustering_max_iters >= 1, ErrorKind::kConfig,
          "smipr: clustering_max_iters must be >= 1");
}

Index SmiprConfig::resolve_num_clusters(Index num_bags,
                                        Index num_classes) const {
  if (num_clusters > 0) return num_clusters;
  const Index automatic =
      std::max<Index>(num_classes, (num_bags + 3) / 4);
  return std::clamp<Index>(automatic, 1, num_bags);
}

Matrix make_layer2_weights(Layer2Rule rule, Index rows, Index cols) {
  Matrix w(rows, cols);
  for (Index p = 0; p < rows; ++p)
    for (Index q = 0; q < cols; ++q) {
      const bool diag = p == q;
      w(p, q) = rule == Layer2Rule::kComplement ? (diag ? 0.0 : 1.0)
                                                : (diag ? 1.0 : 0.0);
    }
  return w;
}

SmiprNet make_smipr_net(std::vector<Bag> medoids, Index num_classes,
                        const SmiprConfig& config) {
  config.validate();
  require(!medoids.empty(), ErrorKind::kInvalidArgument,
          "smipr: at least one medoid is required");
  require(num_classes >= 1, ErrorKind::kInvalidArgument,
          "smipr: num_classes must be >= 1");
  SmiprNet net;
  const auto s = static_cast<Index>(medoids.size());
  net.medoids = std::move(medoids);
  net.layer2_rule = config.layer2_weight_rule;
  net.hidden_activation = config.hidden_activation;
  const Index layer2_width = config.num_layers == 2 ? num_classes : s;
  net.layer2 = make_layer2_weights(config.layer2_weight_rule, s, layer2_width);
  net.layer2_mean = RowVector::Zero(layer2_width);
  net.layer2_scale = RowVector::Ones(layer2_width);

  std::vector<Index> widths{layer2_width};
  for (int w : config.hidden_widths) widths.push_back(w);
  if (config.num_layers > 2) widths.push_back(num_classes);
  SeededRng rng(config.seed, streams::kSmiprInit);
  for (std::size_t l = 0; l + 1 < widths.size(); ++l)
    net.weights.push_back(random_matrix(widths[l], widths[l + 1], rng));
  return net;
}

Matrix medoid_distances(const SmiprNet& net, std::span<const Bag> bags) {
  Matrix out(static_cast<Index>(bags.size()), net.num_clusters());
  parallel_for(bags.size(), [&](std::size_t i) {
    for (Index p = 0; p < net.num_clusters(); ++p)
      out(static_cast<Index>(i), p) =
          hausdorff(bags[i], net.medoids[static_cast<std::size_t>(p)]);
  });
  return out;
}

namespace {

// Standardized layer-2 output for the given medoid distances.
Matrix layer2_output(const SmiprNet& net, const Matrix& distances) {
  require(distances.cols() == net.num_clusters(), ErrorKind::kDimensionMismatch,
          "smipr: got " + std::to_string(distances.cols()) +
              " medoid distances, net has " + std::to_string(net.num_clusters()) +
              " medoids");
  Matrix a = distances * net.layer2;
  if (!net.weights.empty()) {
    a.rowwise() -= net.layer2_mean;
    a.array().rowwise() /= net.layer2_scale.array();
  }
  return a;
}

// pre[0] is the layer-2 output, pre[l + 1] = act[l] * weights[l], and the
// last entry is the network output.
struct Trace {
  std::vector<Matrix> pre;
  std::vector<Matrix> act;
};

Trace forward_trace(const std::vector<Matrix>& weights, ActivationKind kind,
                    Matrix a0) {
  Trace t;
  t.pre.push_back(std::move(a0));
  for (const Matrix& w : weights) {
    t.act.push_back(apply_activation(t.pre.back(), kind));
    t.pre.push_back(t.act.back() * w);
  }
  return t;
}

double half_sse(const Matrix& g, const Matrix& targets) {
  require(targets.rows() == g.rows() && targets.cols() == g.cols(),
          ErrorKind::kDimensionMismatch,
          "sse_loss: targets are " + std::to_string(targets.rows()) + "x" +
              std::to_string(targets.cols()) + ", outputs are " +
              std::to_string(g.rows()) + "x" + std::to_string(g.cols()));
  return 0.5 * (g - targets).squaredNorm();
}

std::vector<Matrix> backprop(const Trace& t, const std::vector<Matrix>& weights,
                             ActivationKind kind, const Matrix& targets) {
  std::vector<Matrix> grads(weights.size());
  if (weights.empty()) return grads;
  Matrix delta = t.pre.back() - targets;  // dE/d(output)
  for (std::size_t l = weights.size(); l-- > 0;) {
    grads[l].noalias() = t.act[l].transpose() * delta;
    if (l == 0) break;
    Matrix back = delta * weights[l].transpose();
    const Matrix& pre = t.pre[l];
    for (Index i = 0; i < back.rows(); ++i)
      for (Index j = 0; j < back.cols(); ++j)
        back(i, j) *= activate_derivative(pre(i, j), kind);
    delta = std::move(back);
  }
  return grads;
}

void apply_step(std::vector<Matrix>& weights, const std::vector<Matrix>& grads,
                double eta) {
  for (std::size_t l = 0; l < grads.size(); ++l) {
    if (!grads[l].allFinite()) {
      fail(ErrorKind::kNumerical, "smipr: non-finite gradient in trainable layer " +
                                      std::to_string(l + 3));
    }
    weights[l] -= eta * grads[l];
  }
}

void check_eta(double eta) {
  require(eta >= 0.0 && std::isfinite(eta), ErrorKind::kInvalidArgument,
          "smipr: eta must be finite and >= 0");
}

}  // namespace

Matrix forward_from_distances(const SmiprNet& net, const Matrix& distances) {
  return forward_trace(net.weights, net.hidden_activation,
                       layer2_output(net, distances))
      .pre.back();
}

RowVector smipr_forward(const SmiprNet& net, const Bag& bag) {
  return smipr_forward(net, std::span<const Bag>(&bag, 1)).row(0);
}

Matrix smipr_forward(const SmiprNet& net, std::span<const Bag> bags) {
  return forward_from_distances(net, medoid_distances(net, bags));
}

double sse_loss_from_distances(const SmiprNet& net, const Matrix& distances,
                               const Matrix& targets) {
  return half_sse(forward_from_distances(net, distances), targets);
}

double sse_loss(const SmiprNet& net, std::span<const Bag> bags,
                const Matrix& targets) {
  return sse_loss_from_distances(net, medoid_distances(net, bags), targets);
}

std::vector<Matrix> sse_gradient(const SmiprNet& net, const Matrix& distances,
                                 const Matrix& targets) {
  const Trace t = forward_trace(net.weights, net.hidden_activation,
                                layer2_output(net, distances));
  half_sse(t.pre.back(), targets);  // shape check
  return backprop(t, net.weights, net.hidden_activation, targets);
}

SmiprNet train_epoch_from_distances(const SmiprNet& net,
                                    const Matrix& distances,
                                    const Matrix& targets, double eta) {
  check_eta(eta);
  SmiprNet out = net;
  apply_step(out.weights, sse_gradient(net, distances, targets), eta);
  return out;
}

SmiprNet smipr_train_epoch(const SmiprNet& net, std::span<const Bag> bags,
                           const Matrix& targets, double eta) {
  require(static_cast<Index>(bags.size()) == targets.rows(),
          ErrorKind::kDimensionMismatch,
          "smipr_train_epoch: bag count != target rows");
  return train_epoch_from_distances(net, medoid_distances(net, bags), targets,
                                    eta);
}

SmiprFit fit_smipr(std::span<const Bag> bags, const Matrix& targets,
                   const SmiprConfig& config) {
  config.validate();
  const auto n = static_cast<Index>(bags.size());
  require(n >= 1, ErrorKind::kInvalidArgument, "fit_smipr: no bags");
  require(targets.rows() == n, ErrorKind::kDimensionMismatch,
          "fit_smipr: " + std::to_string(n) + " bags but " +
              std::to_string(targets.rows()) + " target rows");
  require(targets.allFinite(), ErrorKind::kNumerical,
          "fit_smipr: targets contain non-finite values");
  const Index s = config.resolve_num_clusters(n, targets.cols());
  require(s <= n, ErrorKind::kConfig,
          "smipr: " + std::to_string(s) + " clusters requested for " +
              std::to_string(n) + " bags");

  const Matrix dist = pairwise_bag_distances(bags);
  SmiprFit fit;
  fit.clusters = cluster_from_distances(dist, s, config.seed,
                                        config.clustering_max_iters);
  std::vector<Bag> medoids;
  for (std::size_t m : fit.clusters.medoid_indices) medoids.push_back(bags[m]);
  fit.clusters.medoids = medoids;
  fit.net = make_smipr_net(std::move(medoids), targets.cols(), config);

  // Hausdorff is symmetric bit for bit, so the medoid columns of the pairwise
  // matrix are exactly what medoid_distances would recompute.
  Matrix phi(n, s);
  for (Index p = 0; p < s; ++p)
    phi.col(p) = dist.col(static_cast<Index>(fit.clusters.medoid_indices[p]));

  if (!fit.net.weights.empty() && config.normalize_distances) {
    const Matrix a = phi * fit.net.layer2;
    fit.net.layer2_mean = a.colwise().mean();
    for (Index c = 0; c < a.cols(); ++c) {
      const double var = (a.col(c).array() - fit.net.layer2_mean(c)).square().mean();
      const double sd = std::sqrt(var);
      fit.net.layer2_scale(c) = sd > 1e-12 ? sd : 1.0;
    }
  }

  // The layer-2 output is fixed during training, so it is computed once. The
  // loss of each epoch comes from the same forward pass as its gradient.
  const Matrix a0 = layer2_output(fit.net, phi);
  fit.eta = config.eta;
  if (fit.eta == 0.0 && !fit.net.weights.empty()) {
    // 1 / lambda_max of the last layer's Gram matrix: the inverse curvature of
    // E in the output weights, a step that cannot overshoot along them.
    const Trace t0 = forward_trace(fit.net.weights, fit.net.hidden_activation, a0);
    const Matrix& last = t0.act.back();
    const Matrix gram = last.transpose() * last;
    const double lmax =
        Eigen::SelfAdjointEigenSolver<Matrix>(gram, Eigen::EigenvaluesOnly)
            .eigenvalues()
            .maxCoeff();
    fit.eta = lmax > 0.0 ? 1.0 / lmax : 1.0;
  }
  check_eta(fit.eta);
  fit.loss_history.reserve(static_cast<std::size_t>(config.epochs) + 1);
  for (int e = 0;; ++e) {
    const Trace t = forward_trace(fit.net.weights, fit.net.hidden_activation, a0);
    fit.loss_history.push_back(half_sse(t.pre.back(), targets));
    if (e == config.epochs) break;
    apply_step(fit.net.weights,
               backprop(t, fit.net.weights, fit.net.hidden_activation, targets),
               fit.eta);
  }
  if (fit.loss_history.back() > fit.loss_history.front()) {
    warn("smipr: loss rose from " + std::to_string(fit.loss_history.front()) +
         " to " + std::to_string(fit.loss_history.back()) +
         " during training; eta is likely too large for this data");
  }
  return fit;
}

}  // namespace bmiml
