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

#include "bmiml/errors.h"

#include <iostream>
#include <mutex>
#include <utility>

#include "bmiml/logging.h"

namespace bmiml {

std::string_view error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid_argument";
    case ErrorKind::kParse: return "parse_error";
    case ErrorKind::kDimensionMismatch: return "dimension_mismatch";
    case ErrorKind::kLabelArity: return "label_arity";
    case ErrorKind::kIo: return "io_error";
    case ErrorKind::kSingularSystem: return "singular_system";
    case ErrorKind::kNumerical: return "numerical_failure";
    case ErrorKind::kCorrupt: return "corrupt_file";
    case ErrorKind::kUnsupportedVersion: return "unsupported_version";
    case ErrorKind::kConfig: return "config_error";
  }
  return "unknown";
}

namespace {

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

WarningSink& sink_slot() {
  static WarningSink sink;
  return sink;
}

}  // namespace

void set_warning_sink(WarningSink sink) {
  std::lock_guard<std::mutex> lock(sink_mutex());
  sink_slot() = std::move(sink);
}

void warn(const std::string& message) {
  std::lock_guard<std::mutex> lock(sink_mutex());
  if (sink_slot()) {
    sink_slot()(message);
  } else {
    std::cerr << "warning: " << message << "\n";
  }
}

}  // namespace bmiml
