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

#include "bmiml/awlel.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "bmiml/errors.h"

namespace bmiml {

void AwlelConfig::validate() const {
  require(lambda >= 0.0 && std::isfinite(lambda), ErrorKind::kConfig,
          "awlel: lambda must be finite and >= 0");
  require(vartheta > 0.0 && std::isfinite(vartheta), ErrorKind::kConfig,
          "awlel: vartheta must be finite and > 0");
  require(max_iters >= 1, ErrorKind::kConfig, "awlel: max_iters must be >= 1");
  require(tol > 0.0, ErrorKind::kConfig, "awlel: tol must be > 0");
  require(eps_floor > 0.0, ErrorKind::kConfig, "awlel: eps_floor must be > 0");
}

RetargetProjection make_retarget_projection(Index width,
                                            ActivationKind activation,
                                            std::uint64_t seed) {
  require(width >= 1, ErrorKind::kInvalidArgument,
          "retarget width must be >= 1");
  SeededRng rng(seed, streams::kRetargetBias);
  return {activation, random_matrix(1, width, rng).row(0)};
}

namespace {

// Keeps the first `width` columns, zero-filling when there are fewer.
Matrix fit_width(const Matrix& m, Index width) {
  Matrix out = Matrix::Zero(m.rows(), width);
  const Index keep = std::min(width, m.cols());
  out.leftCols(keep) = m.leftCols(keep);
  return out;
}

}  // namespace

Matrix build_retarget_nodes(const MappedNodes& nodes, const BlsFeatureMap& map,
                            const RetargetProjection& projection) {
  const BlsConfig& cfg = map.config;
  const Index n = nodes.scaled_input.rows();
  Matrix input_term = Matrix::Zero(n, cfg.k1);
  for (const Matrix& w : map.feature_weights) input_term += nodes.scaled_input * w;
  input_term /= static_cast<double>(cfg.m1);
  Matrix feature_term = Matrix::Zero(n, cfg.k2);
  for (const Matrix& w : map.enhancement_weights) feature_term += nodes.z * w;
  feature_term /= static_cast<double>(cfg.m2);

  const Index width = projection.width();
  Matrix pre = fit_width(input_term, width) + fit_width(feature_term, width);
  pre.rowwise() += projection.bias;
  return apply_activation(pre, projection.activation);
}

Matrix build_retarget_nodes(const Matrix& x, const BlsFeatureMap& map,
                            const RetargetProjection& projection) {
  return build_retarget_nodes(map_nodes(map, x), map, projection);
}

Matrix build_augmented_design(const Matrix& x, const Matrix& design,
                              const Matrix& retarget, bool include_raw) {
  require(x.rows() == design.rows() && x.rows() == retarget.rows(),
          ErrorKind::kDimensionMismatch,
          "augmented design blocks have differing row counts (" +
              std::to_string(x.rows()) + ", " + std::to_string(design.rows()) +
              ", " + std::to_string(retarget.rows()) + ")");
  const Index raw = include_raw ? x.cols() : 0;
  Matrix a(x.rows(), raw + design.cols() + retarget.cols());
  if (include_raw) a.leftCols(raw) = x;
  a.middleCols(raw, design.cols()) = design;
  a.rightCols(retarget.cols()) = retarget;
  return a;
}

SampleWeights compute_sample_weights(const Matrix& a, const Matrix& wt,
                                     const Matrix& t, const Matrix& y,
                                     double eps_floor) {
  require(a.rows() == t.rows() && t.rows() == y.rows() &&
              t.cols() == y.cols() && a.cols() == wt.rows() &&
              wt.cols() == t.cols(),
          ErrorKind::kDimensionMismatch, "compute_sample_weights: shape mismatch");
  require(eps_floor > 0.0, ErrorKind::kInvalidArgument,
          "compute_sample_weights: eps_floor must be > 0");
  const Matrix fit_residual = a * wt - t;
  SampleWeights w;
  w.gamma.resize(t.rows());
  w.omega.resize(t.rows());
  for (Index i = 0; i < t.rows(); ++i) {
    w.gamma(i) = 1.0 / std::max(eps_floor, fit_residual.row(i).norm());
    w.omega(i) = 1.0 / std::max(eps_floor, (t.row(i) - y.row(i)).norm());
  }
  return w;
}

Matrix update_targets(const Matrix& a, const Matrix& wt, const Matrix& y,
                      const Vector& gamma, const Vector& omega,
                      double vartheta) {
  require(a.rows() == y.rows() && gamma.size() == y.rows() &&
              omega.size() == y.rows() && a.cols() == wt.rows() &&
              wt.cols() == y.cols(),
          ErrorKind::kDimensionMismatch, "update_targets: shape mismatch");
  const Matrix fitted = a * wt;
  Matrix t(y.rows(), y.cols());
  for (Index i = 0; i < y.rows(); ++i) {
    const double gw = gamma(i);
    const double ow = vartheta * omega(i);
    require(gw > 0.0 && ow > 0.0, ErrorKind::kInvalidArgument,
            "update_targets: weights must be positive");
    t.row(i) = (gw * fitted.row(i) + ow * y.row(i)) / (gw + ow);
  }
  return t;
}

double awlel_objective(const Matrix& a, const Matrix& wt, const Matrix& t,
                       const Matrix& y, const Vector& gamma,
                       const Vector& omega, double lambda, double vartheta) {
  const Matrix fit_residual = a * wt - t;
  const Matrix label_residual = t - y;
  double total = lambda * wt.squaredNorm();
  for (Index i = 0; i < t.rows(); ++i) {
    total += gamma(i) * fit_residual.row(i).squaredNorm();
    total += vartheta * omega(i) * label_residual.row(i).squaredNorm();
  }
  return total;
}

namespace {

Matrix design_from_nodes(const AwlelModel& model, const MappedNodes& nodes) {
  Matrix zh(nodes.z.rows(), nodes.z.cols() + nodes.h.cols());
  zh << nodes.z, nodes.h;
  const Matrix r = build_retarget_nodes(nodes, model.bls_map, model.retarget);
  return build_augmented_design(nodes.scaled_input, zh, r,
                                model.config.include_raw_features);
}

}  // namespace

AwlelFit fit_awlel(const Matrix& x, const Matrix& y, const BlsConfig& bls,
                   const AwlelConfig& config,
                   const std::optional<Vector>& initial_gamma) {
  config.validate();
  require(x.rows() == y.rows(), ErrorKind::kDimensionMismatch,
          "fit_awlel: X has " + std::to_string(x.rows()) + " rows, Y has " +
              std::to_string(y.rows()));
  require(x.rows() >= 1 && y.cols() >= 1, ErrorKind::kInvalidArgument,
          "fit_awlel: empty training data");

  AwlelFit fit;
  AwlelModel& model = fit.model;
  model.config = config;
  model.bls_map = fit_feature_map(x.cols(), bls);
  if (bls.standardize) model.bls_map.scaler = ColumnScaler::fit(x);
  model.retarget =
      make_retarget_projection(y.cols(), config.retarget_activation, bls.seed);

  const Matrix a = design_from_nodes(model, map_nodes(model.bls_map, x));
  const Index n = y.rows();

  AwlelState& st = fit.state;
  st.t = y;
  st.wt = Matrix::Zero(a.cols(), y.cols());
  st.gamma = Vector::Ones(n);
  if (initial_gamma) {
    require(initial_gamma->size() == n, ErrorKind::kDimensionMismatch,
            "fit_awlel: initial gamma has wrong length");
    st.gamma = *initial_gamma;
  }
  st.omega = Vector::Ones(n);

  for (int it = 0; it < config.max_iters; ++it) {
    AwlelStep step;
    step.before = awlel_objective(a, st.wt, st.t, y, st.gamma, st.omega,
                                  config.lambda, config.vartheta);
    st.wt = weighted_ridge_solve(a, st.t, st.gamma, config.lambda);
    step.after_w = awlel_objective(a, st.wt, st.t, y, st.gamma, st.omega,
                                   config.lambda, config.vartheta);
    Matrix t_new = update_targets(a, st.wt, y, st.gamma, st.omega,
                                  config.vartheta);
    step.after_t = awlel_objective(a, st.wt, t_new, y, st.gamma, st.omega,
                                   config.lambda, config.vartheta);
    const double base = st.t.norm();
    const double change = (t_new - st.t).norm();
    step.delta_t = base > 0.0 ? change / base : change;
    if (!std::isfinite(step.after_w) || !std::isfinite(step.after_t) ||
        !t_new.allFinite()) {
      fail(ErrorKind::kNumerical,
           "fit_awlel: non-finite objective at iteration " +
               std::to_string(it + 1) + " (after_w=" +
               std::to_string(step.after_w) +
               ", after_t=" + std::to_string(step.after_t) + ")");
    }
    st.t = std::move(t_new);
    st.objective_history.push_back(step.after_w);
    st.objective_history.push_back(step.after_t);
    st.steps.push_back(step);
    st.iterations = it + 1;

    const SampleWeights w =
        compute_sample_weights(a, st.wt, st.t, y, config.eps_floor);
    st.gamma = w.gamma;
    st.omega = w.omega;
    if (step.delta_t < config.tol) {
      st.converged = true;
      break;
    }
  }
  st.final_residual = (a * st.wt - st.t).norm();
  model.wt = st.wt;
  model.t_min = st.t.minCoeff();
  model.t_max = st.t.maxCoeff();
  return fit;
}

Matrix awlel_design(const AwlelModel& model, const Matrix& x) {
  return design_from_nodes(model, map_nodes(model.bls_map, x));
}

Matrix awlel_predict_scores(const AwlelModel& model, const Matrix& x) {
  const Matrix a = awlel_design(model, x);
  require(a.cols() == model.wt.rows(), ErrorKind::kDimensionMismatch,
          "awlel_predict_scores: design width " + std::to_string(a.cols()) +
              " != weight rows " + std::to_string(model.wt.rows()));
  return a * model.wt;
}

}  // namespace bmiml
