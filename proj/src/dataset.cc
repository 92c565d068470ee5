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

#include "bmiml/dataset.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "bmiml/binary_io.h"
#include "bmiml/errors.h"
#include "bmiml/logging.h"

namespace bmiml {

void validate_bag(const Bag& bag) {
  require(bag.instances.rows() >= 1, ErrorKind::kInvalidArgument,
          "bag '" + bag.id + "' has no instances");
  require(bag.instances.cols() >= 1, ErrorKind::kDimensionMismatch,
          "bag '" + bag.id + "' has zero-dimensional instances");
  require(bag.labels.size() >= 2, ErrorKind::kLabelArity,
          "bag '" + bag.id + "' has " + std::to_string(bag.labels.size()) +
              " labels; at least 2 are required");
  for (auto y : bag.labels) {
    require(y == 0 || y == 1, ErrorKind::kLabelArity,
            "bag '" + bag.id + "' has a label outside {0, 1}");
  }
  require(bag.instances.allFinite(), ErrorKind::kInvalidArgument,
          "bag '" + bag.id + "' has non-finite instance values");
}

void validate_dataset(const MimlDataset& ds) {
  require(!ds.bags.empty(), ErrorKind::kInvalidArgument,
          "dataset '" + ds.name + "' has no bags");
  std::vector<int> positives(static_cast<std::size_t>(ds.num_classes), 0);
  for (const Bag& bag : ds.bags) {
    validate_bag(bag);
    if (bag.dim() != ds.instance_dim) {
      fail(ErrorKind::kDimensionMismatch,
           "bag '" + bag.id + "' has instance dimension " +
               std::to_string(bag.dim()) + ", dataset expects " +
               std::to_string(ds.instance_dim));
    }
    if (bag.num_classes() != ds.num_classes) {
      fail(ErrorKind::kLabelArity,
           "bag '" + bag.id + "' has " + std::to_string(bag.num_classes()) +
               " labels, dataset expects " + std::to_string(ds.num_classes));
    }
    for (std::size_t k = 0; k < bag.labels.size(); ++k)
      positives[k] += bag.labels[k];
  }
  for (std::size_t k = 0; k < positives.size(); ++k) {
    if (positives[k] == 0) {
      warn("dataset '" + ds.name + "': class " + std::to_string(k) +
           " has no positive bag");
    }
  }
}

MimlDataset make_dataset(std::string name, std::vector<Bag> bags) {
  MimlDataset ds;
  ds.name = std::move(name);
  require(!bags.empty(), ErrorKind::kInvalidArgument,
          "dataset '" + ds.name + "' has no bags");
  ds.instance_dim = bags.front().dim();
  ds.num_classes = bags.front().num_classes();
  ds.bags = std::move(bags);
  validate_dataset(ds);
  return ds;
}

MimlDataset subset(const MimlDataset& ds,
                   std::span<const std::size_t> indices) {
  MimlDataset out;
  out.name = ds.name;
  out.instance_dim = ds.instance_dim;
  out.num_classes = ds.num_classes;
  out.bags.reserve(indices.size());
  for (std::size_t i : indices) {
    require(i < ds.bags.size(), ErrorKind::kInvalidArgument,
            "subset index " + std::to_string(i) + " out of range");
    out.bags.push_back(ds.bags[i]);
  }
  return out;
}

Matrix label_matrix(const MimlDataset& ds) {
  Matrix y(ds.size(), ds.num_classes);
  for (Index i = 0; i < ds.size(); ++i)
    for (Index k = 0; k < ds.num_classes; ++k)
      y(i, k) = ds.bags[static_cast<std::size_t>(i)]
                    .labels[static_cast<std::size_t>(k)];
  return y;
}

std::string_view format_name(DatasetFormat format) {
  return format == DatasetFormat::kCsvBags ? "csv-bags" : "binary-bags";
}

DatasetFormat parse_format(std::string_view name) {
  if (name == "csv-bags" || name == "csv") return DatasetFormat::kCsvBags;
  if (name == "binary-bags" || name == "binary")
    return DatasetFormat::kBinaryBags;
  fail(ErrorKind::kConfig, "unknown dataset format '" + std::string(name) +
                               "' (expected csv-bags|binary-bags)");
}

DatasetFormat format_for_path(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".mimlb" || ext == ".bin") return DatasetFormat::kBinaryBags;
  return DatasetFormat::kCsvBags;
}

// ---------------------------------------------------------------------------
// csv-bags

namespace {

constexpr std::string_view kCsvMagic = "#miml";

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

[[noreturn]] void parse_fail(std::size_t line, const std::string& msg) {
  fail(ErrorKind::kParse, "line " + std::to_string(line) + ": " + msg);
}

long long parse_int_field(std::string_view token, std::string_view key,
                          std::size_t line) {
  if (token.substr(0, key.size()) != key) {
    parse_fail(line, "expected '" + std::string(key) + "<int>', got '" +
                         std::string(token) + "'");
  }
  std::string_view digits = token.substr(key.size());
  long long v = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
  if (ec != std::errc() || ptr != digits.data() + digits.size()) {
    parse_fail(line, "malformed integer in '" + std::string(token) + "'");
  }
  return v;
}

double parse_double(std::string_view token, std::size_t line) {
  token = trim(token);
  double v = 0.0;
  const char* first = token.data();
  if (!token.empty() && token.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, token.data() + token.size(), v);
  if (token.empty() || ec != std::errc() || ptr != token.data() + token.size() ||
      !std::isfinite(v)) {
    parse_fail(line, "malformed value '" + std::string(token) + "'");
  }
  return v;
}

void append_double(std::string& out, double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

}  // namespace

MimlDataset parse_csv_bags(std::string_view text, std::string name) {
  std::vector<std::string_view> lines = split(text, '\n');
  std::size_t li = 0;
  auto next_line = [&](std::string_view& out) {
    while (li < lines.size()) {
      std::string_view l = trim(lines[li++]);
      if (!l.empty()) {
        out = l;
        return true;
      }
    }
    return false;
  };

  std::string_view header;
  if (!next_line(header)) fail(ErrorKind::kParse, "line 1: empty file");
  const auto head = split_ws(header);
  if (head.size() != 4 || head[0] != kCsvMagic || head[1] != "v1") {
    parse_fail(li, "expected header '#miml v1 D=<int> K=<int>'");
  }
  const long long dim = parse_int_field(head[2], "D=", li);
  const long long k = parse_int_field(head[3], "K=", li);
  if (dim < 1) parse_fail(li, "D must be >= 1");
  if (k < 2) {
    fail(ErrorKind::kLabelArity,
         "line " + std::to_string(li) + ": K must be >= 2");
  }

  MimlDataset ds;
  ds.name = std::move(name);
  ds.instance_dim = dim;
  ds.num_classes = k;

  std::string_view line;
  while (next_line(line)) {
    const std::size_t bag_line = li;
    const auto tok = split_ws(line);
    if (tok.size() != 4 || tok[0] != "bag") {
      parse_fail(bag_line, "expected 'bag <id> n=<int> y=<labels>'");
    }
    Bag bag;
    bag.id = std::string(tok[1]);
    const long long n = parse_int_field(tok[2], "n=", bag_line);
    if (n < 1) parse_fail(bag_line, "bag '" + bag.id + "' declares n < 1");
    if (tok[3].substr(0, 2) != "y=") {
      parse_fail(bag_line, "expected 'y=<labels>' for bag '" + bag.id + "'");
    }
    const auto ys = split(tok[3].substr(2), ',');
    if (static_cast<long long>(ys.size()) != k) {
      fail(ErrorKind::kLabelArity,
           "line " + std::to_string(bag_line) + ": bag '" + bag.id + "' has " +
               std::to_string(ys.size()) + " labels, header declares K=" +
               std::to_string(k));
    }
    for (std::string_view y : ys) {
      if (y == "1") {
        bag.labels.push_back(1);
      } else if (y == "0" || y == "-1") {
        bag.labels.push_back(0);
      } else {
        parse_fail(bag_line, "label '" + std::string(y) + "' of bag '" +
                                 bag.id + "' is not 0, 1 or -1");
      }
    }
    bag.instances.resize(n, dim);
    for (long long r = 0; r < n; ++r) {
      std::string_view row;
      if (!next_line(row)) {
        parse_fail(li, "bag '" + bag.id + "' ends after " + std::to_string(r) +
                           " of " + std::to_string(n) + " instances");
      }
      if (row.substr(0, 4) == "bag ") {
        parse_fail(li, "bag '" + bag.id + "' ends after " + std::to_string(r) +
                           " of " + std::to_string(n) + " instances");
      }
      const auto vals = split(row, ',');
      if (static_cast<long long>(vals.size()) != dim) {
        fail(ErrorKind::kDimensionMismatch,
             "line " + std::to_string(li) + ": bag '" + bag.id +
                 "' has an instance of dimension " +
                 std::to_string(vals.size()) + ", expected " +
                 std::to_string(dim));
      }
      for (long long c = 0; c < dim; ++c)
        bag.instances(r, c) = parse_double(vals[static_cast<std::size_t>(c)], li);
    }
    ds.bags.push_back(std::move(bag));
  }
  if (ds.bags.empty()) parse_fail(li, "no bags after header");
  validate_dataset(ds);
  return ds;
}

std::string format_csv_bags(const MimlDataset& ds) {
  validate_dataset(ds);
  std::string out = "#miml v1 D=" + std::to_string(ds.instance_dim) +
                    " K=" + std::to_string(ds.num_classes) + "\n";
  for (const Bag& bag : ds.bags) {
    require(!bag.id.empty() && bag.id.find_first_of(" \t\r\n") == std::string::npos,
            ErrorKind::kInvalidArgument,
            "bag id '" + bag.id + "' cannot be written to csv-bags "
            "(empty or contains whitespace)");
    out += "bag " + bag.id + " n=" + std::to_string(bag.num_instances()) + " y=";
    for (std::size_t k = 0; k < bag.labels.size(); ++k) {
      if (k) out += ',';
      out += bag.labels[k] ? '1' : '0';
    }
    out += '\n';
    for (Index r = 0; r < bag.num_instances(); ++r) {
      for (Index c = 0; c < bag.dim(); ++c) {
        if (c) out += ',';
        append_double(out, bag.instances(r, c));
      }
      out += '\n';
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// binary-bags

namespace {
constexpr std::string_view kBinaryMagic{"MIML1\0", 6};
}  // namespace

MimlDataset parse_binary_bags(std::string_view bytes, std::string name) {
  ByteReader in(bytes, ErrorKind::kParse);
  if (bytes.size() < kBinaryMagic.size() ||
      in.get_bytes(kBinaryMagic.size()) != kBinaryMagic) {
    fail(ErrorKind::kParse, "offset 0: missing MIML1 magic");
  }
  const std::uint32_t n_bags = in.get_u32();
  const std::uint32_t dim = in.get_u32();
  const std::uint32_t k = in.get_u32();
  if (n_bags == 0) fail(ErrorKind::kParse, "offset 6: dataset has no bags");
  if (dim == 0) fail(ErrorKind::kParse, "offset 10: D must be >= 1");
  if (k < 2) fail(ErrorKind::kLabelArity, "offset 14: K must be >= 2");

  MimlDataset ds;
  ds.name = std::move(name);
  ds.instance_dim = dim;
  ds.num_classes = k;
  ds.bags.reserve(n_bags);
  for (std::uint32_t b = 0; b < n_bags; ++b) {
    Bag bag;
    bag.id = in.get_string();
    const std::uint32_t n = in.get_u32();
    if (n == 0) {
      fail(ErrorKind::kParse, "offset " + std::to_string(in.offset()) +
                                  ": bag '" + bag.id + "' has no instances");
    }
    for (std::uint32_t c = 0; c < k; ++c) {
      const std::uint8_t y = in.get_u8();
      if (y > 1) {
        fail(ErrorKind::kParse, "offset " + std::to_string(in.offset() - 1) +
                                    ": label byte of bag '" + bag.id +
                                    "' is not 0 or 1");
      }
      bag.labels.push_back(y);
    }
    if (static_cast<std::uint64_t>(n) * dim > in.remaining() / 8) {
      fail(ErrorKind::kParse, "offset " + std::to_string(in.offset()) +
                                  ": truncated instance data for bag '" +
                                  bag.id + "'");
    }
    bag.instances.resize(n, dim);
    for (Index r = 0; r < n; ++r)
      for (Index c = 0; c < dim; ++c) bag.instances(r, c) = in.get_f64();
    ds.bags.push_back(std::move(bag));
  }
  if (!in.at_end()) {
    fail(ErrorKind::kParse, "offset " + std::to_string(in.offset()) +
                                ": trailing bytes after last bag");
  }
  validate_dataset(ds);
  return ds;
}

std::string format_binary_bags(const MimlDataset& ds) {
  validate_dataset(ds);
  ByteWriter out;
  out.put_bytes(kBinaryMagic);
  out.put_u32(static_cast<std::uint32_t>(ds.bags.size()));
  out.put_u32(static_cast<std::uint32_t>(ds.instance_dim));
  out.put_u32(static_cast<std::uint32_t>(ds.num_classes));
  for (const Bag& bag : ds.bags) {
    out.put_string(bag.id);
    out.put_u32(static_cast<std::uint32_t>(bag.num_instances()));
    for (auto y : bag.labels) out.put_u8(y);
    for (Index r = 0; r < bag.num_instances(); ++r)
      for (Index c = 0; c < bag.dim(); ++c) out.put_f64(bag.instances(r, c));
  }
  return out.take();
}

MimlDataset load_dataset(const std::filesystem::path& path,
                         DatasetFormat format) {
  if (!std::filesystem::exists(path)) {
    fail(ErrorKind::kIo, "dataset file '" + path.string() + "' does not exist");
  }
  const std::string data = read_file(path);
  const std::string name = path.stem().string();
  return format == DatasetFormat::kCsvBags ? parse_csv_bags(data, name)
                                           : parse_binary_bags(data, name);
}

void save_dataset(const MimlDataset& ds, const std::filesystem::path& path,
                  DatasetFormat format) {
  require(!ds.bags.empty(), ErrorKind::kInvalidArgument,
          "refusing to write an empty dataset to '" + path.string() + "'");
  const std::string data = format == DatasetFormat::kCsvBags
                               ? format_csv_bags(ds)
                               : format_binary_bags(ds);
  write_file(path, data);
}

// ---------------------------------------------------------------------------
// Patchification

PatchMode parse_patch_mode(std::string_view name) {
  if (name == "strip") return PatchMode::kStrip;
  if (name == "grid") return PatchMode::kGrid;
  fail(ErrorKind::kConfig,
       "unknown patch mode '" + std::string(name) + "' (expected strip|grid)");
}

namespace {

void check_patch_geometry(Index height, Index width, Index channels,
                          Index span) {
  require(span >= 1, ErrorKind::kInvalidArgument, "patch span must be >= 1");
  require(height >= 1 && width >= 1 && channels >= 1,
          ErrorKind::kInvalidArgument, "image has an empty dimension");
  require(span <= height && span <= width, ErrorKind::kInvalidArgument,
          "patch span " + std::to_string(span) + " exceeds image size " +
              std::to_string(height) + "x" + std::to_string(width));
  require(height % span == 0 && width % span == 0,
          ErrorKind::kInvalidArgument,
          "image size " + std::to_string(height) + "x" +
              std::to_string(width) + " is not divisible by span " +
              std::to_string(span));
}

}  // namespace

Matrix patchify_image(const Image& image, PatchMode mode, Index span) {
  check_patch_geometry(image.height, image.width, image.channels, span);
  require(static_cast<Index>(image.pixels.size()) ==
              image.height * image.width * image.channels,
          ErrorKind::kDimensionMismatch, "image pixel buffer has wrong size");
  const Index c = image.channels;
  if (mode == PatchMode::kStrip) {
    const Index bands = image.height / span;
    const Index len = span * image.width * c;
    Matrix out(bands, len);
    for (Index b = 0; b < bands; ++b)
      for (Index j = 0; j < len; ++j)
        out(b, j) = image.pixels[static_cast<std::size_t>(b * len + j)];
    return out;
  }
  const Index tiles_y = image.height / span;
  const Index tiles_x = image.width / span;
  Matrix out(tiles_y * tiles_x, span * span * c);
  for (Index ty = 0; ty < tiles_y; ++ty) {
    for (Index tx = 0; tx < tiles_x; ++tx) {
      const Index row = ty * tiles_x + tx;
      Index j = 0;
      for (Index y = 0; y < span; ++y)
        for (Index x = 0; x < span; ++x)
          for (Index ch = 0; ch < c; ++ch)
            out(row, j++) = image.at(ty * span + y, tx * span + x, ch);
    }
  }
  return out;
}

Image assemble_image(const Matrix& patches, PatchMode mode, Index span,
                     Index height, Index width, Index channels) {
  check_patch_geometry(height, width, channels, span);
  Image img;
  img.height = height;
  img.width = width;
  img.channels = channels;
  img.pixels.assign(static_cast<std::size_t>(height * width * channels), 0.0);
  if (mode == PatchMode::kStrip) {
    const Index len = span * width * channels;
    require(patches.rows() == height / span && patches.cols() == len,
            ErrorKind::kDimensionMismatch, "strip patches do not fit image");
    for (Index b = 0; b < patches.rows(); ++b)
      for (Index j = 0; j < len; ++j)
        img.pixels[static_cast<std::size_t>(b * len + j)] = patches(b, j);
    return img;
  }
  const Index tiles_x = width / span;
  require(patches.rows() == (height / span) * tiles_x &&
              patches.cols() == span * span * channels,
          ErrorKind::kDimensionMismatch, "grid patches do not fit image");
  for (Index row = 0; row < patches.rows(); ++row) {
    const Index ty = row / tiles_x;
    const Index tx = row % tiles_x;
    Index j = 0;
    for (Index y = 0; y < span; ++y)
      for (Index x = 0; x < span; ++x)
        for (Index ch = 0; ch < channels; ++ch) {
          const Index py = ty * span + y;
          const Index px = tx * span + x;
          img.pixels[static_cast<std::size_t>((py * width + px) * channels + ch)] =
              patches(row, j++);
        }
  }
  return img;
}

// ---------------------------------------------------------------------------
// Splitting and shuffling

SplitFractions parse_split_spec(std::string_view spec) {
  const auto parts = split(spec, '/');
  if (parts.size() != 3) {
    fail(ErrorKind::kConfig, "split spec '" + std::string(spec) +
                                 "' must look like 60/10/30");
  }
  double v[3];
  for (int i = 0; i < 3; ++i) {
    std::string_view p = trim(parts[static_cast<std::size_t>(i)]);
    auto [ptr, ec] = std::from_chars(p.data(), p.data() + p.size(), v[i]);
    if (p.empty() || ec != std::errc() || ptr != p.data() + p.size() ||
        !(v[i] > 0.0)) {
      fail(ErrorKind::kConfig, "split spec '" + std::string(spec) +
                                   "' has a non-positive or malformed part");
    }
  }
  const double total = v[0] + v[1] + v[2];
  return {v[0] / total, v[1] / total, v[2] / total};
}

namespace {

// Largest-remainder apportionment of n items to the given shares.
std::array<std::size_t, 3> apportion(std::size_t n,
                                     const std::array<double, 3>& shares) {
  std::array<std::size_t, 3> sizes{};
  std::array<double, 3> rem{};
  std::size_t assigned = 0;
  for (int i = 0; i < 3; ++i) {
    const double exact = shares[i] * static_cast<double>(n);
    sizes[i] = static_cast<std::size_t>(std::floor(exact));
    rem[i] = exact - std::floor(exact);
    assigned += sizes[i];
  }
  std::array<int, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return rem[a] > rem[b]; });
  for (std::size_t i = 0; assigned < n; ++i, ++assigned) ++sizes[order[i % 3]];
  return sizes;
}

std::vector<std::size_t> permutation(std::size_t n, SeededRng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = rng.uniform_index(i);
    std::swap(idx[i - 1], idx[j]);
  }
  return idx;
}

}  // namespace

DatasetSplit split_dataset(const MimlDataset& ds, SplitFractions fractions,
                           std::uint64_t seed, bool stratified) {
  const std::size_t n = ds.bags.size();
  require(n >= 3, ErrorKind::kInvalidArgument,
          "split_dataset needs at least 3 bags, got " + std::to_string(n));
  const std::array<double, 3> shares{fractions.train, fractions.validation,
                                     fractions.test};
  for (double s : shares) {
    require(s > 0.0, ErrorKind::kInvalidArgument,
            "split fractions must be positive");
  }
  require(std::abs(shares[0] + shares[1] + shares[2] - 1.0) < 1e-9,
          ErrorKind::kInvalidArgument, "split fractions must sum to 1");

  SeededRng rng(seed, streams::kSplit);
  std::vector<std::size_t> order = permutation(n, rng);
  const auto sizes = apportion(n, shares);
  std::array<std::vector<std::size_t>, 3> parts;

  if (!stratified) {
    std::size_t pos = 0;
    for (int p = 0; p < 3; ++p)
      for (std::size_t i = 0; i < sizes[p]; ++i) parts[p].push_back(order[pos++]);
  } else {
    // Group bags by label vector, then deal them out so each part stays as
    // close to its target share as possible at every step.
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       return ds.bags[a].labels < ds.bags[b].labels;
                     });
    std::array<std::size_t, 3> filled{};
    for (std::size_t idx : order) {
      int best = -1;
      double best_ratio = 0.0;
      for (int p = 0; p < 3; ++p) {
        if (filled[p] >= sizes[p]) continue;
        const double ratio = static_cast<double>(filled[p]) /
                             static_cast<double>(sizes[p]);
        if (best < 0 || ratio < best_ratio) {
          best = p;
          best_ratio = ratio;
        }
      }
      parts[best].push_back(idx);
      ++filled[best];
    }
  }
  for (auto& p : parts) std::sort(p.begin(), p.end());

  DatasetSplit out;
  out.train_indices = std::move(parts[0]);
  out.validation_indices = std::move(parts[1]);
  out.test_indices = std::move(parts[2]);
  out.seed = seed;
  return out;
}

MimlDataset shuffle_instances(const MimlDataset& ds, std::uint64_t seed) {
  MimlDataset out = ds;
  const SeededRng base(seed, streams::kShuffle);
  for (std::size_t b = 0; b < out.bags.size(); ++b) {
    Bag& bag = out.bags[b];
    const auto n = static_cast<std::size_t>(bag.num_instances());
    if (n < 2) continue;
    SeededRng rng = base.split(b);
    const std::vector<std::size_t> perm = permutation(n, rng);
    Matrix shuffled(bag.instances.rows(), bag.instances.cols());
    for (std::size_t r = 0; r < n; ++r)
      shuffled.row(static_cast<Index>(r)) =
          ds.bags[b].instances.row(static_cast<Index>(perm[r]));
    bag.instances = std::move(shuffled);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic data

MimlDataset generate_synthetic(const SyntheticSpec& spec,
                               SyntheticTruth* truth) {
  require(spec.num_classes >= 2, ErrorKind::kInvalidArgument,
          "synthetic: K must be >= 2");
  require(spec.dim >= spec.num_classes, ErrorKind::kInvalidArgument,
          "synthetic: D must be >= K");
  require(spec.num_bags >= 1 && spec.instances_per_bag >= 1,
          ErrorKind::kInvalidArgument,
          "synthetic: bag and instance counts must be >= 1");
  require(spec.noise_std >= 0.0 && std::isfinite(spec.noise_std),
          ErrorKind::kInvalidArgument, "synthetic: noise_std must be >= 0");

  const Index k = spec.num_classes;
  const Index d = spec.dim;
  const Index n = spec.instances_per_bag;
  SeededRng rng(spec.seed, streams::kSynthetic);
  const Matrix prototypes = random_matrix(k, d, rng);
  const RowVector background = random_matrix(1, d, rng).row(0);

  const Index max_planted = std::min(k, n);
  std::vector<Bag> bags;
  bags.reserve(static_cast<std::size_t>(spec.num_bags));
  for (Index b = 0; b < spec.num_bags; ++b) {
    Bag bag;
    bag.id = "bag" + std::to_string(b);
    bag.labels.assign(static_cast<std::size_t>(k), 0);
    const auto planted =
        static_cast<Index>(1 + rng.uniform_index(static_cast<std::uint64_t>(max_planted)));
    const auto classes = permutation(static_cast<std::size_t>(k), rng);
    const auto slots = permutation(static_cast<std::size_t>(n), rng);
    bag.instances.resize(n, d);
    for (Index s = 0; s < n; ++s) {
      const auto slot = static_cast<Index>(slots[static_cast<std::size_t>(s)]);
      if (s < planted) {
        const auto cls = classes[static_cast<std::size_t>(s)];
        bag.labels[cls] = 1;
        bag.instances.row(slot) = prototypes.row(static_cast<Index>(cls));
      } else {
        bag.instances.row(slot) = background;
      }
    }
    if (spec.noise_std > 0.0) {
      for (Index r = 0; r < n; ++r)
        for (Index c = 0; c < d; ++c)
          bag.instances(r, c) += rng.normal(0.0, spec.noise_std);
    }
    bags.push_back(std::move(bag));
  }
  if (truth) {
    truth->prototypes = prototypes;
    truth->background = background;
  }
  return make_dataset("synthetic", std::move(bags));
}

}  // namespace bmiml
