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

#include "bmiml/numerics.h"

#include <cmath>
#include <limits>

#include "bmiml/errors.h"

namespace bmiml {

std::string_view activation_name(ActivationKind kind) {
  switch (kind) {
    case ActivationKind::kSigmoid: return "sigmoid";
    case ActivationKind::kTanh: return "tanh";
    case ActivationKind::kTribas: return "tribas";
  }
  return "unknown";
}

ActivationKind parse_activation(std::string_view name) {
  if (name == "sigmoid") return ActivationKind::kSigmoid;
  if (name == "tanh") return ActivationKind::kTanh;
  if (name == "tribas") return ActivationKind::kTribas;
  fail(ErrorKind::kConfig, "unknown activation '" + std::string(name) +
                               "' (expected sigmoid|tanh|tribas)");
}

double activate(double x, ActivationKind kind) {
  switch (kind) {
    case ActivationKind::kSigmoid:
      // Split on sign so exp never overflows.
      if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
      {
        const double e = std::exp(x);
        return e / (1.0 + e);
      }
    case ActivationKind::kTanh:
      return std::tanh(x);
    case ActivationKind::kTribas:
      return std::max(0.0, 1.0 - std::abs(x));
  }
  return x;
}

double activate_derivative(double x, ActivationKind kind) {
  switch (kind) {
    case ActivationKind::kSigmoid: {
      const double s = activate(x, kind);
      return s * (1.0 - s);
    }
    case ActivationKind::kTanh: {
      const double t = std::tanh(x);
      return 1.0 - t * t;
    }
    case ActivationKind::kTribas:
      if (x > 0.0 && x < 1.0) return -1.0;
      if (x < 0.0 && x > -1.0) return 1.0;
      return 0.0;
  }
  return 1.0;
}

Matrix apply_activation(const Matrix& m, ActivationKind kind) {
  return m.unaryExpr([kind](double x) { return activate(x, kind); });
}

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

SeededRng::SeededRng(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream) {
  std::uint64_t sm = seed;
  const std::uint64_t base = splitmix64(sm);
  std::uint64_t stream_state = stream ^ 0xD1B54A32D192ED03ULL;
  std::uint64_t init = base ^ splitmix64(stream_state);
  for (auto& s : state_) s = splitmix64(init);
}

std::uint64_t SeededRng::next_u64() {
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double SeededRng::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double SeededRng::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform01();
}

std::uint64_t SeededRng::uniform_index(std::uint64_t n) {
  require(n > 0, ErrorKind::kInvalidArgument, "uniform_index: n must be > 0");
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t r = next_u64();
    if (r >= threshold) return r % n;
  }
}

double SeededRng::normal(double mean, double stddev) {
  if (has_spare_normal_) {
    has_spare_normal_ = false;
    return mean + stddev * spare_normal_;
  }
  double u1 = uniform01();
  while (u1 <= 0.0) u1 = uniform01();
  const double u2 = uniform01();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * M_PI * u2;
  spare_normal_ = radius * std::sin(angle);
  has_spare_normal_ = true;
  return mean + stddev * radius * std::cos(angle);
}

SeededRng SeededRng::split(std::uint64_t child_stream) const {
  std::uint64_t mix = stream_;
  const std::uint64_t derived = splitmix64(mix) ^ child_stream;
  return SeededRng(seed_, derived);
}

Matrix random_matrix(Index rows, Index cols, SeededRng& rng) {
  require(rows >= 1 && cols >= 1, ErrorKind::kInvalidArgument,
          "random_matrix: dimensions must be >= 1, got " +
              std::to_string(rows) + "x" + std::to_string(cols));
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
  return m;
}

namespace {

// Solves the symmetric system g x = rhs. With a positive ridge the system is
// positive definite and LLT is tried first; QR handles what LLT rejects.
Matrix solve_spd(const Matrix& g, const Matrix& rhs, bool ridge_positive) {
  if (ridge_positive) {
    Eigen::LLT<Matrix> llt(g);
    if (llt.info() == Eigen::Success) return llt.solve(rhs);
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(g);
  if (qr.rank() < g.rows()) {
    fail(ErrorKind::kSingularSystem,
         "ridge system is singular (rank " + std::to_string(qr.rank()) +
             " < " + std::to_string(g.rows()) + "); use lambda > 0");
  }
  return qr.solve(rhs);
}

}  // namespace

Matrix ridge_solve(const Matrix& a, const Matrix& t, double lambda) {
  require(a.rows() == t.rows(), ErrorKind::kDimensionMismatch,
          "ridge_solve: A has " + std::to_string(a.rows()) +
              " rows but T has " + std::to_string(t.rows()));
  require(lambda >= 0.0 && std::isfinite(lambda), ErrorKind::kInvalidArgument,
          "ridge_solve: lambda must be finite and >= 0");
  require(a.rows() >= 1 && a.cols() >= 1, ErrorKind::kInvalidArgument,
          "ridge_solve: empty design matrix");
  const Index n = a.rows();
  const Index d = a.cols();
  const bool ridge_positive = lambda > 0.0;
  if (d <= n) {
    Matrix gram = a.transpose() * a;
    gram.diagonal().array() += lambda;
    const Matrix rhs = a.transpose() * t;
    return solve_spd(gram, rhs, ridge_positive);
  }
  if (!ridge_positive) {
    fail(ErrorKind::kSingularSystem,
         "ridge_solve: A^T A is singular with " + std::to_string(d) +
             " columns and " + std::to_string(n) + " rows at lambda = 0");
  }
  Matrix kernel = a * a.transpose();
  kernel.diagonal().array() += lambda;
  const Matrix alpha = solve_spd(kernel, t, ridge_positive);
  return a.transpose() * alpha;
}

Matrix weighted_ridge_solve(const Matrix& a, const Matrix& t,
                            const Vector& gamma, double lambda) {
  require(gamma.size() == a.rows(), ErrorKind::kDimensionMismatch,
          "weighted_ridge_solve: weight vector length " +
              std::to_string(gamma.size()) + " != rows " +
              std::to_string(a.rows()));
  require(a.rows() == t.rows(), ErrorKind::kDimensionMismatch,
          "weighted_ridge_solve: A and T row counts differ");
  for (Index i = 0; i < gamma.size(); ++i) {
    if (!(gamma(i) > 0.0) || !std::isfinite(gamma(i))) {
      fail(ErrorKind::kInvalidArgument,
           "weighted_ridge_solve: weight " + std::to_string(i) +
               " must be finite and > 0");
    }
  }
  // sqrt(G) A and sqrt(G) T turn the weighted system into a plain ridge.
  const Vector root = gamma.array().sqrt();
  const Matrix a_scaled = root.asDiagonal() * a;
  const Matrix t_scaled = root.asDiagonal() * t;
  return ridge_solve(a_scaled, t_scaled, lambda);
}

Vector softmax(const Vector& v) {
  require(v.size() >= 1, ErrorKind::kInvalidArgument, "softmax: empty input");
  const double peak = v.maxCoeff();
  Vector e = (v.array() - peak).exp();
  return e / e.sum();
}

Matrix softmax_rows(const Matrix& m) {
  Matrix out(m.rows(), m.cols());
  for (Index i = 0; i < m.rows(); ++i) {
    out.row(i) = softmax(m.row(i).transpose()).transpose();
  }
  return out;
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

void require_finite(const Matrix& m, const std::string& what) {
  if (!m.allFinite()) {
    fail(ErrorKind::kNumerical, what + " contains non-finite values");
  }
}

}  // namespace bmiml
