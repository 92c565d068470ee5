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

#ifndef BMIML_TESTS_ORACLES_H_
#define BMIML_TESTS_ORACLES_H_

// Deliberately naive reference implementations, written from the
// definitions without reusing library code.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "bmiml/numerics.h"

namespace bmiml::oracle {

// Class order by descending score, ties to the lower index.
inline std::vector<Index> ranking_order(const Matrix& s, Index i) {
  std::vector<Index> order(static_cast<std::size_t>(s.cols()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return s(i, a) > s(i, b); });
  return order;
}

inline double hamming_loss(const Matrix& p, const Matrix& y) {
  int wrong = 0;
  for (Index i = 0; i < y.rows(); ++i)
    for (Index k = 0; k < y.cols(); ++k) wrong += (p(i, k) > 0.5) != (y(i, k) > 0.5);
  return static_cast<double>(wrong) / static_cast<double>(y.size());
}

inline double one_error(const Matrix& s, const Matrix& y) {
  int counted = 0, wrong = 0;
  for (Index i = 0; i < y.rows(); ++i) {
    if (y.row(i).sum() == 0) continue;
    ++counted;
    wrong += y(i, ranking_order(s, i).front()) == 0.0;
  }
  return counted ? static_cast<double>(wrong) / counted : 0.0;
}

inline double ranking_loss(const Matrix& s, const Matrix& y) {
  double total = 0;
  int counted = 0;
  for (Index i = 0; i < y.rows(); ++i) {
    double bad = 0;
    int pairs = 0;
    for (Index p = 0; p < y.cols(); ++p)
      for (Index n = 0; n < y.cols(); ++n) {
        if (y(i, p) != 1.0 || y(i, n) != 0.0) continue;
        ++pairs;
        if (s(i, p) < s(i, n)) bad += 1;
        else if (s(i, p) == s(i, n)) bad += 0.5;
      }
    if (pairs == 0) continue;
    total += bad / pairs;
    ++counted;
  }
  return counted ? total / counted : 0.0;
}

inline double average_precision(const Matrix& s, const Matrix& y) {
  double total = 0;
  int counted = 0;
  for (Index i = 0; i < y.rows(); ++i) {
    if (y.row(i).sum() == 0) continue;
    const auto order = ranking_order(s, i);
    double sum = 0;
    int positives = 0;
    for (std::size_t r = 0; r < order.size(); ++r) {
      if (y(i, order[r]) != 1.0) continue;
      ++positives;
      // Positives seen so far are the true labels ranked at or above.
      sum += static_cast<double>(positives) / static_cast<double>(r + 1);
    }
    total += sum / positives;
    ++counted;
  }
  return counted ? total / counted : 1.0;
}

// Hausdorff distance with an explicit square root per instance pair.
inline double hausdorff(const Matrix& a, const Matrix& b) {
  auto directed = [](const Matrix& from, const Matrix& to) {
    double worst = 0;
    for (Index i = 0; i < from.rows(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (Index j = 0; j < to.rows(); ++j) {
        double s = 0;
        for (Index c = 0; c < from.cols(); ++c) s += std::pow(from(i, c) - to(j, c), 2);
        best = std::min(best, std::sqrt(s));
      }
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

// Minimizes sum_i g_i |A_i w - T_i|^2 + lambda |w|^2 by conjugate gradients
// on the quadratic, one output column at a time.
inline Matrix weighted_ridge_cg(const Matrix& a, const Matrix& t, const Vector& g,
                                double lambda) {
  const Index d = a.cols();
  auto apply = [&](const Vector& v) {
    Vector out = lambda * v;
    for (Index i = 0; i < a.rows(); ++i) {
      double r = 0;
      for (Index j = 0; j < d; ++j) r += a(i, j) * v(j);
      for (Index j = 0; j < d; ++j) out(j) += g(i) * a(i, j) * r;
    }
    return out;
  };
  Matrix w = Matrix::Zero(d, t.cols());
  for (Index k = 0; k < t.cols(); ++k) {
    Vector b = Vector::Zero(d);
    for (Index i = 0; i < a.rows(); ++i)
      for (Index j = 0; j < d; ++j) b(j) += g(i) * a(i, j) * t(i, k);
    Vector x = Vector::Zero(d), r = b, p = r;
    double rr = r.dot(r);
    for (int it = 0; it < 50 * d && std::sqrt(rr) > 1e-15 * (1 + b.norm()); ++it) {
      const Vector ap = apply(p);
      const double alpha = rr / p.dot(ap);
      x += alpha * p;
      r -= alpha * ap;
      const double next = r.dot(r);
      p = r + (next / rr) * p;
      rr = next;
    }
    w.col(k) = x;
  }
  return w;
}

// Minimizes g |f - t|^2 + v |t - y|^2 over t by gradient descent.
inline RowVector blend_descent(const RowVector& f, const RowVector& y, double g,
                               double v) {
  RowVector t = RowVector::Zero(f.size());
  const double step = 0.25 / (g + v);
  for (int it = 0; it < 5000; ++it) {
    const RowVector grad = 2 * g * (t - f) + 2 * v * (t - y);
    if (grad.norm() < 1e-14 * (g + v)) break;
    t -= step * grad;
  }
  return t;
}

}  // namespace bmiml::oracle

#endif  // BMIML_TESTS_ORACLES_H_
