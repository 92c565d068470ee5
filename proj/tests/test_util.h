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

#ifndef BMIML_TESTS_TEST_UTIL_H_
#define BMIML_TESTS_TEST_UTIL_H_

#include <functional>
#include <string>
#include <vector>

#include "bmiml/dataset.h"
#include "bmiml/errors.h"
#include "bmiml/logging.h"
#include "bmiml/numerics.h"

namespace bmiml::testing {

inline Matrix uniform(Index rows, Index cols, SeededRng& rng, double lo = -1.0,
                      double hi = 1.0) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.uniform(lo, hi);
  return m;
}

inline Matrix random_labels(Index rows, Index cols, SeededRng& rng,
                            bool at_least_one = true) {
  Matrix y = Matrix::Zero(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index k = 0; k < cols; ++k) y(i, k) = rng.uniform01() < 0.4 ? 1.0 : 0.0;
    if (at_least_one && y.row(i).sum() == 0.0)
      y(i, static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(cols)))) = 1.0;
  }
  return y;
}

inline Bag random_bag(const std::string& id, Index n, Index d, Index k,
                      SeededRng& rng) {
  Bag b;
  b.id = id;
  b.instances = uniform(n, d, rng);
  b.labels.resize(static_cast<std::size_t>(k));
  for (auto& l : b.labels) l = rng.uniform01() < 0.5 ? 1 : 0;
  return b;
}

// Kind of the Error thrown by `fn`, failing the test if nothing is thrown.
inline ErrorKind thrown_kind(const std::function<void()>& fn,
                             std::string* message = nullptr) {
  try {
    fn();
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.kind();
  }
  throw std::runtime_error("expected a bmiml::Error");
}

// Collects warnings for the lifetime of the object.
class WarningCapture {
 public:
  WarningCapture() {
    set_warning_sink([this](const std::string& m) { messages.push_back(m); });
  }
  ~WarningCapture() { set_warning_sink(nullptr); }
  std::vector<std::string> messages;
};

inline double rel_diff(double a, double b) {
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(a - b) / scale;
}

}  // namespace bmiml::testing

#endif  // BMIML_TESTS_TEST_UTIL_H_
