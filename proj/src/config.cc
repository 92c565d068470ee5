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

#include "bmiml/config.h"

#include <charconv>
#include <functional>
#include <map>
#include <string>

#include "bmiml/binary_io.h"
#include "bmiml/errors.h"

namespace bmiml {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value,
                            const char* expected) {
  fail(ErrorKind::kConfig, std::string(key) + ": invalid value '" +
                               std::string(value) + "' (expected " + expected + ")");
}

double to_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || v.empty())
    bad_value(key, v, "a number");
  return out;
}

int to_int(std::string_view key, std::string_view v) {
  int out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || v.empty())
    bad_value(key, v, "an integer");
  return out;
}

std::uint64_t to_u64(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || v.empty())
    bad_value(key, v, "a non-negative integer");
  return out;
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad_value(key, v, "true or false");
}

template <typename T, typename F>
std::vector<T> to_list(std::string_view v, F parse_one) {
  std::vector<T> out;
  if (trim(v).empty()) return out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = v.find(',', pos);
    out.push_back(parse_one(trim(v.substr(pos, comma - pos))));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::string fmt(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

std::string fmt(bool v) { return v ? "true" : "false"; }

template <typename T>
std::string fmt_list(const std::vector<T>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    if constexpr (std::is_same_v<T, double>) out += fmt(xs[i]);
    else out += std::to_string(xs[i]);
  }
  return out;
}

struct KeySpec {
  std::function<void(RunConfig&, std::string_view key, std::string_view value)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define BMIML_DOUBLE(field) \
  {[](RunConfig& c, std::string_view k, std::string_view v) { c.field = to_double(k, v); }, \
   [](const RunConfig& c) { return fmt(c.field); }}
#define BMIML_INT(field) \
  {[](RunConfig& c, std::string_view k, std::string_view v) { c.field = to_int(k, v); }, \
   [](const RunConfig& c) { return std::to_string(c.field); }}
#define BMIML_U64(field) \
  {[](RunConfig& c, std::string_view k, std::string_view v) { c.field = to_u64(k, v); }, \
   [](const RunConfig& c) { return std::to_string(c.field); }}
#define BMIML_BOOL(field) \
  {[](RunConfig& c, std::string_view k, std::string_view v) { c.field = to_bool(k, v); }, \
   [](const RunConfig& c) { return fmt(c.field); }}
#define BMIML_ACT(field) \
  {[](RunConfig& c, std::string_view, std::string_view v) { c.field = parse_activation(v); }, \
   [](const RunConfig& c) { return std::string(activation_name(c.field)); }}
#define BMIML_STR(field) \
  {[](RunConfig& c, std::string_view, std::string_view v) { c.field = std::string(v); }, \
   [](const RunConfig& c) { return c.field; }}

// Ordered: format_run_config writes keys in this order.
const std::vector<std::pair<std::string, KeySpec>>& key_table() {
  static const std::vector<std::pair<std::string, KeySpec>> table = {
      {"pipeline.seed",
       {[](RunConfig& c, std::string_view k, std::string_view v) {
          c.pipeline.set_seed(to_u64(k, v));
        },
        [](const RunConfig& c) { return std::to_string(c.pipeline.seed); }}},
      {"pipeline.module",
       {[](RunConfig& c, std::string_view, std::string_view v) {
          c.pipeline.variant = parse_variant(v);
        },
        [](const RunConfig& c) { return std::string(variant_name(c.pipeline.variant)); }}},
      {"pipeline.tau",
       {[](RunConfig& c, std::string_view k, std::string_view v) {
          c.pipeline.tau = to_list<double>(v, [&](std::string_view x) { return to_double(k, x); });
        },
        [](const RunConfig& c) { return fmt_list(c.pipeline.tau); }}},
      {"pipeline.global_view",
       {[](RunConfig& c, std::string_view, std::string_view v) {
          c.pipeline.global_view = parse_global_view(v);
        },
        [](const RunConfig& c) {
          return std::string(global_view_name(c.pipeline.global_view));
        }}},
      {"pipeline.force_top1", BMIML_BOOL(pipeline.force_top1)},
      {"pipeline.outer_rounds", BMIML_INT(pipeline.outer_rounds)},
      {"bls.m1", BMIML_INT(pipeline.bls.m1)},
      {"bls.k1", BMIML_INT(pipeline.bls.k1)},
      {"bls.m2", BMIML_INT(pipeline.bls.m2)},
      {"bls.k2", BMIML_INT(pipeline.bls.k2)},
      {"bls.feature_activation", BMIML_ACT(pipeline.bls.feature_activation)},
      {"bls.enhancement_activation", BMIML_ACT(pipeline.bls.enhancement_activation)},
      {"bls.lambda", BMIML_DOUBLE(pipeline.bls.lambda)},
      {"bls.standardize", BMIML_BOOL(pipeline.bls.standardize)},
      {"bls.seed", BMIML_U64(pipeline.bls.seed)},
      {"awlel.lambda", BMIML_DOUBLE(pipeline.awlel.lambda)},
      {"awlel.vartheta", BMIML_DOUBLE(pipeline.awlel.vartheta)},
      {"awlel.max_iters", BMIML_INT(pipeline.awlel.max_iters)},
      {"awlel.tol", BMIML_DOUBLE(pipeline.awlel.tol)},
      {"awlel.eps_floor", BMIML_DOUBLE(pipeline.awlel.eps_floor)},
      {"awlel.retarget_activation", BMIML_ACT(pipeline.awlel.retarget_activation)},
      {"awlel.include_raw_features", BMIML_BOOL(pipeline.awlel.include_raw_features)},
      {"smipr.num_clusters", BMIML_INT(pipeline.smipr.num_clusters)},
      {"smipr.num_layers", BMIML_INT(pipeline.smipr.num_layers)},
      {"smipr.hidden_widths",
       {[](RunConfig& c, std::string_view k, std::string_view v) {
          c.pipeline.smipr.hidden_widths =
              to_list<int>(v, [&](std::string_view x) { return to_int(k, x); });
        },
        [](const RunConfig& c) { return fmt_list(c.pipeline.smipr.hidden_widths); }}},
      {"smipr.eta", BMIML_DOUBLE(pipeline.smipr.eta)},
      {"smipr.epochs", BMIML_INT(pipeline.smipr.epochs)},
      {"smipr.hidden_activation", BMIML_ACT(pipeline.smipr.hidden_activation)},
      {"smipr.layer2_weight_rule",
       {[](RunConfig& c, std::string_view, std::string_view v) {
          c.pipeline.smipr.layer2_weight_rule = parse_layer2_rule(v);
        },
        [](const RunConfig& c) {
          return std::string(layer2_rule_name(c.pipeline.smipr.layer2_weight_rule));
        }}},
      {"smipr.seed", BMIML_U64(pipeline.smipr.seed)},
      {"smipr.clustering_max_iters", BMIML_INT(pipeline.smipr.clustering_max_iters)},
      {"smipr.normalize_distances", BMIML_BOOL(pipeline.smipr.normalize_distances)},
      {"io.data", BMIML_STR(data)},
      {"io.model", BMIML_STR(model)},
      {"io.out", BMIML_STR(out)},
  };
  return table;
}

#undef BMIML_DOUBLE
#undef BMIML_INT
#undef BMIML_U64
#undef BMIML_BOOL
#undef BMIML_ACT
#undef BMIML_STR

const KeySpec* find_key(std::string_view key) {
  for (const auto& [name, spec] : key_table())
    if (name == key) return &spec;
  return nullptr;
}

}  // namespace

void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value) {
  const KeySpec* spec = find_key(key);
  require(spec != nullptr, ErrorKind::kConfig,
          "unknown configuration key '" + std::string(key) + "'");
  try {
    spec->set(cfg, key, trim(value));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kConfig) throw;
    fail(ErrorKind::kConfig, std::string(key) + ": " + e.what());
  }
}

RunConfig parse_run_config(std::string_view text) {
  std::map<std::string, std::pair<std::string, int>> entries;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos
                                                 ? std::string_view::npos
                                                 : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (line.front() == '[') {
      require(line.back() == ']' && line.size() > 2, ErrorKind::kConfig,
              where + "malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    require(eq != std::string_view::npos, ErrorKind::kConfig,
            where + "expected 'key = value'");
    std::string key(trim(line.substr(0, eq)));
    require(!key.empty(), ErrorKind::kConfig, where + "empty key");
    if (!section.empty()) key = section + "." + key;
    require(find_key(key) != nullptr, ErrorKind::kConfig,
            where + "unknown configuration key '" + key + "'");
    require(!entries.count(key), ErrorKind::kConfig,
            where + "key '" + key + "' given more than once");
    entries[key] = {std::string(trim(line.substr(eq + 1))), line_no};
  }

  RunConfig cfg;
  auto apply = [&](const std::string& key) {
    const auto& [value, at] = entries.at(key);
    try {
      apply_setting(cfg, key, value);
    } catch (const Error& e) {
      fail(ErrorKind::kConfig, "line " + std::to_string(at) + ": " + e.what());
    }
  };
  if (entries.count("pipeline.seed")) apply("pipeline.seed");
  for (const auto& [key, unused] : entries)
    if (key != "pipeline.seed") apply(key);
  cfg.pipeline.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  return parse_run_config(read_file(path));
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& [name, spec] : key_table()) out.push_back(name);
  return out;
}

std::string format_run_config(const RunConfig& cfg) {
  std::string out;
  for (const auto& [name, spec] : key_table()) {
    out += name + " = " + spec.get(cfg) + "\n";
  }
  return out;
}

}  // namespace bmiml
