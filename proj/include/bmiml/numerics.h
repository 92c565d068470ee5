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

#ifndef BMIML_NUMERICS_H_
#define BMIML_NUMERICS_H_

#include <cstdint>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace bmiml {

// Row-major dense matrix used for every design, weight and label array.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                             Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using Index = Eigen::Index;

enum class ActivationKind { kSigmoid, kTanh, kTribas };

std::string_view activation_name(ActivationKind kind);
ActivationKind parse_activation(std::string_view name);

double activate(double x, ActivationKind kind);
// Derivative with respect to the pre-activation input. tribas uses the
// one-sided value 0 at its kinks (x = 0 and |x| = 1 are measure zero).
double activate_derivative(double x, ActivationKind kind);
Matrix apply_activation(const Matrix& m, ActivationKind kind);

// xoshiro256** seeded through splitmix64. A (seed, stream) pair names one
// independent sequence; identical pairs give identical draws everywhere
// because nothing here goes through std:: distributions.
class SeededRng {
 public:
  SeededRng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  std::uint64_t next_u64();
  // Uniform on [0, 1) with 53 bits of mantissa.
  double uniform01();
  double uniform(double lo, double hi);
  // Unbiased integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n);
  double normal(double mean = 0.0, double stddev = 1.0);

  // A child generator on a derived stream; the parent state is untouched.
  SeededRng split(std::uint64_t child_stream) const;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t state_[4];
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

// Stream ids for the fixed random draws of each model component.
namespace streams {
inline constexpr std::uint64_t kFeatureWeights = 0x100;
inline constexpr std::uint64_t kEnhancementWeights = 0x200;
inline constexpr std::uint64_t kRetargetBias = 0x300;
inline constexpr std::uint64_t kSmiprInit = 0x400;
inline constexpr std::uint64_t kClustering = 0x500;
inline constexpr std::uint64_t kSplit = 0x700;
inline constexpr std::uint64_t kShuffle = 0x800;
inline constexpr std::uint64_t kSynthetic = 0x900;
inline constexpr std::uint64_t kFolds = 0xA00;
}  // namespace streams

// Entries i.i.d. uniform(-1, 1).
Matrix random_matrix(Index rows, Index cols, SeededRng& rng);

// Solves (lambda I + A^T A) W = A^T T. Uses the d x d primal system when
// d <= N and the N x N dual form W = A^T (lambda I + A A^T)^{-1} T otherwise.
// Throws kSingularSystem when lambda == 0 and the Gram matrix is singular.
Matrix ridge_solve(const Matrix& a, const Matrix& t, double lambda);

// Solves (lambda I + A^T G A) W = A^T G T for G = diag(gamma), gamma > 0.
Matrix weighted_ridge_solve(const Matrix& a, const Matrix& t,
                            const Vector& gamma, double lambda);

// Max-subtracted softmax.
Vector softmax(const Vector& v);
Matrix softmax_rows(const Matrix& m);

bool all_finite(const Matrix& m);
void require_finite(const Matrix& m, const std::string& what);

}  // namespace bmiml

#endif  // BMIML_NUMERICS_H_
