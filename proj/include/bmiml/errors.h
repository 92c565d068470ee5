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

#ifndef BMIML_ERRORS_H_
#define BMIML_ERRORS_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace bmiml {

enum class ErrorKind {
  kInvalidArgument,
  kParse,
  kDimensionMismatch,
  kLabelArity,
  kIo,
  kSingularSystem,
  kNumerical,
  kCorrupt,
  kUnsupportedVersion,
  kConfig,
};

std::string_view error_kind_name(ErrorKind kind);

// Every failure raised by the library carries a kind so callers (the CLI in
// particular) can map it onto a stable exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline void require(bool condition, ErrorKind kind,
                    const std::string& message) {
  if (!condition) fail(kind, message);
}

}  // namespace bmiml

#endif  // BMIML_ERRORS_H_
