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

#include "bmiml/pipeline.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "bmiml/errors.h"
#include "bmiml/parallel.h"

namespace bmiml {

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::kAwlel: return "awlel";
    case Variant::kSmipr: return "smipr";
    case Variant::kBmiml: return "bmiml";
  }
  return "?";
}

Variant parse_variant(std::string_view name) {
  if (name == "awlel") return Variant::kAwlel;
  if (name == "smipr") return Variant::kSmipr;
  if (name == "bmiml") return Variant::kBmiml;
  fail(ErrorKind::kConfig, "unknown module '" + std::string(name) +
                               "' (expected awlel, smipr or bmiml)");
}

std::string_view global_view_name(GlobalView v) {
  switch (v) {
    case GlobalView::kMean: return "mean";
    case GlobalView::kMax: return "max";
    case GlobalView::kConcat: return "concat";
  }
  return "?";
}

GlobalView parse_global_view(std::string_view name) {
  if (name == "mean") return GlobalView::kMean;
  if (name == "max") return GlobalView::kMax;
  if (name == "concat") return GlobalView::kConcat;
  fail(ErrorKind::kConfig, "unknown global view '" + std::string(name) +
                               "' (expected mean, max or concat)");
}

void PipelineConfig::validate() const {
  bls.validate();
  awlel.validate();
  smipr.validate();
  require(!tau.empty(), ErrorKind::kConfig, "tau: no thresholds given");
  for (double t : tau) {
    require(t > 0.0 && t < 1.0, ErrorKind::kConfig,
            "tau: thresholds must lie in (0, 1), got " + std::to_string(t));
  }
  require(outer_rounds >= 1, ErrorKind::kConfig,
          "outer_rounds must be at least 1");
}

std::vector<double> PipelineConfig::resolve_tau(Index num_classes) const {
  if (tau.size() == 1)
    return std::vector<double>(static_cast<std::size_t>(num_classes), tau[0]);
  require(static_cast<Index>(tau.size()) == num_classes, ErrorKind::kConfig,
          "tau: " + std::to_string(tau.size()) + " thresholds for " +
              std::to_string(num_classes) + " classes");
  return tau;
}

void PipelineConfig::set_seed(std::uint64_t s) {
  seed = s;
  bls.seed = s;
  smipr.seed = s;
}

Matrix global_view(std::span<const Bag> bags, GlobalView view) {
  require(!bags.empty(), ErrorKind::kInvalidArgument, "global_view: no bags");
  const Index d = bags.front().instances.cols();
  const Index n0 = bags.front().instances.rows();
  const Index width = view == GlobalView::kConcat ? n0 * d : d;
  Matrix out(static_cast<Index>(bags.size()), width);
  for (std::size_t i = 0; i < bags.size(); ++i) {
    const Matrix& x = bags[i].instances;
    require(x.cols() == d, ErrorKind::kDimensionMismatch,
            "bag '" + bags[i].id + "': instance dimension " +
                std::to_string(x.cols()) + ", expected " + std::to_string(d));
    require(x.rows() >= 1, ErrorKind::kInvalidArgument,
            "bag '" + bags[i].id + "' has no instances");
    const auto r = static_cast<Index>(i);
    switch (view) {
      case GlobalView::kMean: out.row(r) = x.colwise().mean(); break;
      case GlobalView::kMax: out.row(r) = x.colwise().maxCoeff(); break;
      case GlobalView::kConcat:
        require(x.rows() == n0, ErrorKind::kDimensionMismatch,
                "concat global view needs a uniform instance count; bag '" +
                    bags[i].id + "' has " + std::to_string(x.rows()) +
                    ", expected " + std::to_string(n0));
        // Row-major storage makes the instance rows contiguous.
        out.row(r) = Eigen::Map<const RowVector>(x.data(), width);
        break;
    }
  }
  return out;
}

Matrix clip_scores(const Matrix& scores, double t_min, double t_max) {
  require(t_min <= t_max, ErrorKind::kInvalidArgument,
          "clip_scores: empty range");
  return scores.cwiseMax(t_min).cwiseMin(t_max);
}

std::vector<std::uint8_t> decide(const Vector& probabilities,
                                 std::span<const double> tau) {
  require(static_cast<Index>(tau.size()) == probabilities.size(),
          ErrorKind::kDimensionMismatch, "decide: threshold count mismatch");
  std::vector<std::uint8_t> out(tau.size());
  for (std::size_t c = 0; c < tau.size(); ++c)
    out[c] = probabilities(static_cast<Index>(c)) > tau[c] ? 1 : 0;
  return out;
}

namespace {

Vector residual_gamma(const Matrix& scores, const Matrix& t, double eps) {
  Vector g(t.rows());
  for (Index i = 0; i < t.rows(); ++i)
    g(i) = 1.0 / std::max(eps, (scores.row(i) - t.row(i)).norm());
  return g;
}

}  // namespace

BmimlFit fit_bmiml(const MimlDataset& train, const PipelineConfig& config) {
  config.validate();
  validate_dataset(train);
  const Index n = static_cast<Index>(train.bags.size());
  const Index k = train.num_classes;
  config.resolve_tau(k);
  if (config.variant != Variant::kAwlel) {
    const Index s = config.smipr.resolve_num_clusters(n, k);
    require(s <= n, ErrorKind::kConfig,
            std::to_string(s) + " clusters requested but the training set has " +
                std::to_string(n) + " bags");
  }

  const std::span<const Bag> bags(train.bags);
  const Matrix y = label_matrix(train);

  BmimlFit fit;
  BmimlModel& model = fit.model;
  model.config = config;
  model.instance_dim = train.instance_dim;
  model.num_classes = k;

  if (config.variant == Variant::kSmipr) {
    SmiprFit s = fit_smipr(bags, y, config.smipr);
    model.smipr = std::move(s.net);
    model.t_min = 0.0;
    model.t_max = 1.0;
    fit.smipr_targets = y;
    fit.smipr_loss = std::move(s.loss_history);
    fit.smipr_eta = s.eta;
    return fit;
  }

  const Matrix xg = global_view(bags, config.global_view);
  model.global_dim = xg.cols();
  AwlelFit a = fit_awlel(xg, y, config.bls, config.awlel);
  if (config.variant == Variant::kAwlel) {
    model.t_min = a.model.t_min;
    model.t_max = a.model.t_max;
    model.awlel = std::move(a.model);
    fit.awlel_state = std::move(a.state);
    return fit;
  }

  for (int round = 0;; ++round) {
    SmiprFit s = fit_smipr(bags, a.state.t, config.smipr);
    fit.smipr_targets = a.state.t;
    fit.smipr_loss = std::move(s.loss_history);
    fit.smipr_eta = s.eta;
    model.smipr = std::move(s.net);
    model.t_min = a.model.t_min;
    model.t_max = a.model.t_max;
    model.awlel = a.model;
    if (round + 1 >= config.outer_rounds) break;
    const Matrix g = smipr_forward(*model.smipr, bags);
    const Vector gamma0 =
        residual_gamma(g, a.state.t, config.awlel.eps_floor);
    fit.awlel_state = std::move(a.state);
    a = fit_awlel(xg, y, config.bls, config.awlel, gamma0);
  }
  fit.awlel_state = std::move(a.state);
  return fit;
}

Matrix raw_model_scores(const BmimlModel& model, std::span<const Bag> bags) {
  require(!bags.empty(), ErrorKind::kInvalidArgument, "predict: no bags");
  for (const Bag& b : bags) {
    require(b.instances.cols() == model.instance_dim,
            ErrorKind::kDimensionMismatch,
            "bag '" + b.id + "': instance dimension " +
                std::to_string(b.instances.cols()) + ", model expects " +
                std::to_string(model.instance_dim));
  }
  if (model.config.variant == Variant::kAwlel) {
    require(model.awlel.has_value(), ErrorKind::kCorrupt,
            "model has no label-enhancement stage");
    const Matrix xg = global_view(bags, model.config.global_view);
    require(xg.cols() == model.global_dim, ErrorKind::kDimensionMismatch,
            "global view width " + std::to_string(xg.cols()) +
                ", model expects " + std::to_string(model.global_dim));
    return awlel_predict_scores(*model.awlel, xg);
  }
  require(model.smipr.has_value(), ErrorKind::kCorrupt,
          "model has no regression stage");
  return smipr_forward(*model.smipr, bags);
}

PredictionSet predict_bags(const BmimlModel& model, std::span<const Bag> bags,
                           const PredictOptions& options) {
  PipelineConfig cfg = model.config;
  if (options.tau) cfg.tau = *options.tau;
  cfg.validate();
  const std::vector<double> tau = cfg.resolve_tau(model.num_classes);
  const bool top1 = options.force_top1.value_or(cfg.force_top1);

  PredictionSet out;
  out.raw_scores = clip_scores(raw_model_scores(model, bags), model.t_min,
                               model.t_max);
  require_finite(out.raw_scores, "prediction scores");
  out.probabilities = softmax_rows(out.raw_scores);
  out.labels = Matrix::Zero(out.raw_scores.rows(), out.raw_scores.cols());
  out.bag_ids.reserve(bags.size());
  for (const Bag& b : bags) out.bag_ids.push_back(b.id);
  parallel_for(bags.size(), [&](std::size_t i) {
    const auto r = static_cast<Index>(i);
    const Vector p = out.probabilities.row(r).transpose();
    const auto lab = decide(p, tau);
    bool any = false;
    for (std::size_t c = 0; c < lab.size(); ++c) {
      out.labels(r, static_cast<Index>(c)) = lab[c];
      any = any || lab[c];
    }
    if (top1 && !any) {
      Index best = 0;
      for (Index c = 1; c < p.size(); ++c)
        if (p(c) > p(best)) best = c;
      out.labels(r, best) = 1.0;
    }
  });
  return out;
}

}  // namespace bmiml
