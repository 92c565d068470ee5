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

#ifndef BMIML_CONFIG_H_
#define BMIML_CONFIG_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "bmiml/pipeline.h"

namespace bmiml {

// Everything a run needs: the model configuration plus file locations.
struct RunConfig {
  PipelineConfig pipeline;
  std::string data;   // io.data
  std::string model;  // io.model
  std::string out;    // io.out
};

// Flat `key = value` text. Keys are dotted (`awlel.vartheta`); a `[section]`
// line prefixes the keys that follow it. `#` starts a comment. Unknown or
// repeated keys are errors, and the result is validated before returning.
// `pipeline.seed` is applied before any per-stage seed, whatever the order.
RunConfig parse_run_config(std::string_view text);
RunConfig load_run_config(const std::filesystem::path& path);

// Sets one key; used for command-line overrides. Does not re-validate.
void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value);

// All recognised keys, in the order format_run_config writes them.
std::vector<std::string> config_keys();

// Text that parse_run_config maps back to `cfg`.
std::string format_run_config(const RunConfig& cfg);

}  // namespace bmiml

#endif  // BMIML_CONFIG_H_
