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

// Sectioned model container:
//   "BMML1\0" | u32 version | u32 section count |
//   { tag[4] | u64 length | payload | u32 crc32(payload) } ...
#include <zlib.h>

#include <string>

#include "bmiml/binary_io.h"
#include "bmiml/errors.h"
#include "bmiml/pipeline.h"

namespace bmiml {

namespace {

constexpr std::string_view kMagic{"BMML1\0", 6};
constexpr std::string_view kTagPipeline = "PIPE";
constexpr std::string_view kTagBls = "BLSM";
constexpr std::string_view kTagAwlel = "AWLE";
constexpr std::string_view kTagSmipr = "SMPR";

std::uint32_t checksum(std::string_view bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks to stay within range.
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    const std::size_t n = std::min<std::size_t>(bytes.size() - pos, 1u << 30);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data() + pos),
                static_cast<uInt>(n));
    pos += n;
  }
  return static_cast<std::uint32_t>(crc);
}

void put_i32(ByteWriter& w, int v) { w.put_u32(static_cast<std::uint32_t>(v)); }
int get_i32(ByteReader& r) { return static_cast<int>(r.get_u32()); }

void put_bool(ByteWriter& w, bool v) { w.put_u8(v ? 1 : 0); }
bool get_bool(ByteReader& r) {
  const auto v = r.get_u8();
  require(v <= 1, ErrorKind::kCorrupt, "invalid boolean flag in model file");
  return v == 1;
}

template <typename Enum>
Enum get_enum(ByteReader& r, int count, const char* what) {
  const auto v = r.get_u8();
  require(v < count, ErrorKind::kCorrupt,
          std::string("invalid ") + what + " code in model file");
  return static_cast<Enum>(v);
}

void put_row(ByteWriter& w, const RowVector& v) { w.put_matrix(Matrix(v)); }
RowVector get_row(ByteReader& r) {
  const Matrix m = r.get_matrix();
  require(m.rows() == 1 || m.size() == 0, ErrorKind::kCorrupt,
          "expected a row vector in model file");
  return m.size() == 0 ? RowVector() : RowVector(m.row(0));
}

void put_bls_config(ByteWriter& w, const BlsConfig& c) {
  put_i32(w, c.m1);
  put_i32(w, c.k1);
  put_i32(w, c.m2);
  put_i32(w, c.k2);
  w.put_u8(static_cast<std::uint8_t>(c.feature_activation));
  w.put_u8(static_cast<std::uint8_t>(c.enhancement_activation));
  w.put_f64(c.lambda);
  put_bool(w, c.standardize);
  w.put_u64(c.seed);
}

BlsConfig get_bls_config(ByteReader& r) {
  BlsConfig c;
  c.m1 = get_i32(r);
  c.k1 = get_i32(r);
  c.m2 = get_i32(r);
  c.k2 = get_i32(r);
  c.feature_activation = get_enum<ActivationKind>(r, 3, "activation");
  c.enhancement_activation = get_enum<ActivationKind>(r, 3, "activation");
  c.lambda = r.get_f64();
  c.standardize = get_bool(r);
  c.seed = r.get_u64();
  return c;
}

void put_awlel_config(ByteWriter& w, const AwlelConfig& c) {
  w.put_f64(c.lambda);
  w.put_f64(c.vartheta);
  put_i32(w, c.max_iters);
  w.put_f64(c.tol);
  w.put_f64(c.eps_floor);
  w.put_u8(static_cast<std::uint8_t>(c.retarget_activation));
  put_bool(w, c.include_raw_features);
}

AwlelConfig get_awlel_config(ByteReader& r) {
  AwlelConfig c;
  c.lambda = r.get_f64();
  c.vartheta = r.get_f64();
  c.max_iters = get_i32(r);
  c.tol = r.get_f64();
  c.eps_floor = r.get_f64();
  c.retarget_activation = get_enum<ActivationKind>(r, 3, "activation");
  c.include_raw_features = get_bool(r);
  return c;
}

void put_smipr_config(ByteWriter& w, const SmiprConfig& c) {
  put_i32(w, c.num_clusters);
  put_i32(w, c.num_layers);
  w.put_u32(static_cast<std::uint32_t>(c.hidden_widths.size()));
  for (int h : c.hidden_widths) put_i32(w, h);
  w.put_f64(c.eta);
  put_i32(w, c.epochs);
  w.put_u8(static_cast<std::uint8_t>(c.hidden_activation));
  w.put_u8(static_cast<std::uint8_t>(c.layer2_weight_rule));
  w.put_u64(c.seed);
  put_i32(w, c.clustering_max_iters);
  put_bool(w, c.normalize_distances);
}

SmiprConfig get_smipr_config(ByteReader& r) {
  SmiprConfig c;
  c.num_clusters = get_i32(r);
  c.num_layers = get_i32(r);
  const std::uint32_t nh = r.get_u32();
  require(nh <= r.remaining() / 4, ErrorKind::kCorrupt,
          "hidden width count exceeds section size");
  c.hidden_widths.resize(nh);
  for (auto& h : c.hidden_widths) h = get_i32(r);
  c.eta = r.get_f64();
  c.epochs = get_i32(r);
  c.hidden_activation = get_enum<ActivationKind>(r, 3, "activation");
  c.layer2_weight_rule = get_enum<Layer2Rule>(r, 2, "layer-2 rule");
  c.seed = r.get_u64();
  c.clustering_max_iters = get_i32(r);
  c.normalize_distances = get_bool(r);
  return c;
}

std::string pipeline_section(const BmimlModel& m) {
  ByteWriter w;
  const PipelineConfig& c = m.config;
  w.put_u8(static_cast<std::uint8_t>(c.variant));
  w.put_u8(static_cast<std::uint8_t>(c.global_view));
  put_bool(w, c.force_top1);
  put_i32(w, c.outer_rounds);
  w.put_u64(c.seed);
  w.put_u32(static_cast<std::uint32_t>(c.tau.size()));
  for (double t : c.tau) w.put_f64(t);
  put_bls_config(w, c.bls);
  put_awlel_config(w, c.awlel);
  put_smipr_config(w, c.smipr);
  w.put_u64(static_cast<std::uint64_t>(m.instance_dim));
  w.put_u64(static_cast<std::uint64_t>(m.num_classes));
  w.put_u64(static_cast<std::uint64_t>(m.global_dim));
  w.put_f64(m.t_min);
  w.put_f64(m.t_max);
  put_bool(w, m.awlel.has_value());
  put_bool(w, m.smipr.has_value());
  return w.take();
}

struct PipelineHeader {
  bool has_awlel = false;
  bool has_smipr = false;
};

PipelineHeader read_pipeline(ByteReader& r, BmimlModel& m) {
  PipelineConfig& c = m.config;
  c.variant = get_enum<Variant>(r, 3, "variant");
  c.global_view = get_enum<GlobalView>(r, 3, "global view");
  c.force_top1 = get_bool(r);
  c.outer_rounds = get_i32(r);
  c.seed = r.get_u64();
  const std::uint32_t nt = r.get_u32();
  require(nt <= r.remaining() / 8, ErrorKind::kCorrupt,
          "threshold count exceeds section size");
  c.tau.resize(nt);
  for (double& t : c.tau) t = r.get_f64();
  c.bls = get_bls_config(r);
  c.awlel = get_awlel_config(r);
  c.smipr = get_smipr_config(r);
  m.instance_dim = static_cast<Index>(r.get_u64());
  m.num_classes = static_cast<Index>(r.get_u64());
  m.global_dim = static_cast<Index>(r.get_u64());
  m.t_min = r.get_f64();
  m.t_max = r.get_f64();
  PipelineHeader h;
  h.has_awlel = get_bool(r);
  h.has_smipr = get_bool(r);
  return h;
}

std::string bls_section(const BlsFeatureMap& map) {
  ByteWriter w;
  put_bls_config(w, map.config);
  w.put_u64(static_cast<std::uint64_t>(map.input_dim));
  put_row(w, map.scaler.mean);
  put_row(w, map.scaler.scale);
  w.put_u32(static_cast<std::uint32_t>(map.feature_weights.size()));
  for (std::size_t g = 0; g < map.feature_weights.size(); ++g) {
    w.put_matrix(map.feature_weights[g]);
    put_row(w, map.feature_biases[g]);
  }
  w.put_u32(static_cast<std::uint32_t>(map.enhancement_weights.size()));
  for (std::size_t g = 0; g < map.enhancement_weights.size(); ++g) {
    w.put_matrix(map.enhancement_weights[g]);
    put_row(w, map.enhancement_biases[g]);
  }
  return w.take();
}

BlsFeatureMap read_bls(ByteReader& r) {
  BlsFeatureMap map;
  map.config = get_bls_config(r);
  map.input_dim = static_cast<Index>(r.get_u64());
  map.scaler.mean = get_row(r);
  map.scaler.scale = get_row(r);
  const std::uint32_t nf = r.get_u32();
  require(nf <= r.remaining(), ErrorKind::kCorrupt, "bad feature group count");
  for (std::uint32_t g = 0; g < nf; ++g) {
    map.feature_weights.push_back(r.get_matrix());
    map.feature_biases.push_back(get_row(r));
  }
  const std::uint32_t ne = r.get_u32();
  require(ne <= r.remaining(), ErrorKind::kCorrupt, "bad enhancement group count");
  for (std::uint32_t g = 0; g < ne; ++g) {
    map.enhancement_weights.push_back(r.get_matrix());
    map.enhancement_biases.push_back(get_row(r));
  }
  return map;
}

std::string awlel_section(const AwlelModel& a) {
  ByteWriter w;
  put_awlel_config(w, a.config);
  w.put_u8(static_cast<std::uint8_t>(a.retarget.activation));
  put_row(w, a.retarget.bias);
  w.put_matrix(a.wt);
  w.put_f64(a.t_min);
  w.put_f64(a.t_max);
  return w.take();
}

void read_awlel(ByteReader& r, AwlelModel& a) {
  a.config = get_awlel_config(r);
  a.retarget.activation = get_enum<ActivationKind>(r, 3, "activation");
  a.retarget.bias = get_row(r);
  a.wt = r.get_matrix();
  a.t_min = r.get_f64();
  a.t_max = r.get_f64();
}

std::string smipr_section(const SmiprNet& net) {
  ByteWriter w;
  w.put_u32(static_cast<std::uint32_t>(net.medoids.size()));
  for (const Bag& b : net.medoids) {
    w.put_string(b.id);
    w.put_matrix(b.instances);
    w.put_u32(static_cast<std::uint32_t>(b.labels.size()));
    for (auto l : b.labels) w.put_u8(l);
  }
  w.put_u8(static_cast<std::uint8_t>(net.layer2_rule));
  w.put_matrix(net.layer2);
  put_row(w, net.layer2_mean);
  put_row(w, net.layer2_scale);
  w.put_u8(static_cast<std::uint8_t>(net.hidden_activation));
  w.put_u32(static_cast<std::uint32_t>(net.weights.size()));
  for (const Matrix& m : net.weights) w.put_matrix(m);
  return w.take();
}

SmiprNet read_smipr(ByteReader& r) {
  SmiprNet net;
  const std::uint32_t s = r.get_u32();
  require(s <= r.remaining(), ErrorKind::kCorrupt, "bad medoid count");
  for (std::uint32_t i = 0; i < s; ++i) {
    Bag b;
    b.id = r.get_string();
    b.instances = r.get_matrix();
    const std::uint32_t nl = r.get_u32();
    require(nl <= r.remaining(), ErrorKind::kCorrupt, "bad label count");
    b.labels.resize(nl);
    for (auto& l : b.labels) l = r.get_u8();
    net.medoids.push_back(std::move(b));
  }
  net.layer2_rule = get_enum<Layer2Rule>(r, 2, "layer-2 rule");
  net.layer2 = r.get_matrix();
  net.layer2_mean = get_row(r);
  net.layer2_scale = get_row(r);
  net.hidden_activation = get_enum<ActivationKind>(r, 3, "activation");
  const std::uint32_t nw = r.get_u32();
  require(nw <= r.remaining(), ErrorKind::kCorrupt, "bad layer count");
  for (std::uint32_t i = 0; i < nw; ++i) net.weights.push_back(r.get_matrix());
  return net;
}

void put_section(ByteWriter& w, std::string_view tag, const std::string& payload) {
  w.put_bytes(tag);
  w.put_u64(payload.size());
  w.put_bytes(payload);
  w.put_u32(checksum(payload));
}

}  // namespace

std::string serialize_model(const BmimlModel& model) {
  ByteWriter w;
  w.put_bytes(kMagic);
  w.put_u32(kModelFormatVersion);
  std::uint32_t sections = 1;
  if (model.awlel) sections += 2;
  if (model.smipr) sections += 1;
  w.put_u32(sections);
  put_section(w, kTagPipeline, pipeline_section(model));
  if (model.awlel) {
    put_section(w, kTagBls, bls_section(model.awlel->bls_map));
    put_section(w, kTagAwlel, awlel_section(*model.awlel));
  }
  if (model.smipr) put_section(w, kTagSmipr, smipr_section(*model.smipr));
  return w.take();
}

BmimlModel deserialize_model(std::string_view bytes) {
  ByteReader r(bytes, ErrorKind::kCorrupt);
  require(bytes.size() >= kMagic.size() &&
              bytes.substr(0, kMagic.size()) == kMagic,
          ErrorKind::kCorrupt, "not a BMIML model file (bad magic)");
  r.get_bytes(kMagic.size());
  BmimlModel model;
  model.format_version = r.get_u32();
  require(model.format_version == kModelFormatVersion,
          ErrorKind::kUnsupportedVersion,
          "model format version " + std::to_string(model.format_version) +
              " is not supported (this build reads version " +
              std::to_string(kModelFormatVersion) + ")");
  const std::uint32_t count = r.get_u32();

  std::optional<PipelineHeader> header;
  std::optional<BlsFeatureMap> bls;
  std::optional<AwlelModel> awlel;
  for (std::uint32_t s = 0; s < count; ++s) {
    const std::string tag(r.get_bytes(4));
    const std::uint64_t len = r.get_u64();
    require(len <= r.remaining(), ErrorKind::kCorrupt,
            "section " + tag + " is truncated");
    const std::string_view payload = r.get_bytes(static_cast<std::size_t>(len));
    const std::uint32_t crc = r.get_u32();
    require(crc == checksum(payload), ErrorKind::kCorrupt,
            "checksum mismatch in section " + tag);
    ByteReader pr(payload, ErrorKind::kCorrupt);
    if (tag == kTagPipeline) {
      header = read_pipeline(pr, model);
    } else if (tag == kTagBls) {
      bls = read_bls(pr);
    } else if (tag == kTagAwlel) {
      awlel.emplace();
      read_awlel(pr, *awlel);
    } else if (tag == kTagSmipr) {
      model.smipr = read_smipr(pr);
    } else {
      fail(ErrorKind::kCorrupt, "unknown section '" + tag + "'");
    }
    require(pr.at_end(), ErrorKind::kCorrupt,
            "trailing bytes in section " + tag);
  }
  require(r.at_end(), ErrorKind::kCorrupt, "trailing bytes after last section");
  require(header.has_value(), ErrorKind::kCorrupt, "missing pipeline section");
  require(header->has_awlel == (bls.has_value() && awlel.has_value()),
          ErrorKind::kCorrupt, "label-enhancement sections missing or unexpected");
  require(header->has_smipr == model.smipr.has_value(), ErrorKind::kCorrupt,
          "regression section missing or unexpected");
  if (awlel) {
    awlel->bls_map = std::move(*bls);
    model.awlel = std::move(awlel);
  }
  try {
    model.config.validate();
  } catch (const Error& e) {
    fail(ErrorKind::kCorrupt, std::string("stored configuration invalid: ") + e.what());
  }
  return model;
}

void save_model(const BmimlModel& model, const std::filesystem::path& path) {
  write_file(path, serialize_model(model));
}

BmimlModel load_model(const std::filesystem::path& path) {
  return deserialize_model(read_file(path));
}

}  // namespace bmiml
