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

#ifndef BMIML_DATASET_H_
#define BMIML_DATASET_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bmiml/numerics.h"

namespace bmiml {

// One sample: n instance vectors (rows of `instances`, each of width D) that
// share a single K-long 0/1 label vector.
struct Bag {
  std::string id;
  Matrix instances;
  std::vector<std::uint8_t> labels;

  Index num_instances() const { return instances.rows(); }
  Index dim() const { return instances.cols(); }
  Index num_classes() const { return static_cast<Index>(labels.size()); }

  friend bool operator==(const Bag& a, const Bag& b) {
    return a.id == b.id && a.labels == b.labels &&
           a.instances.rows() == b.instances.rows() &&
           a.instances.cols() == b.instances.cols() &&
           a.instances == b.instances;
  }
};

// Throws kInvalidArgument / kDimensionMismatch / kLabelArity on violation.
void validate_bag(const Bag& bag);

struct MimlDataset {
  std::string name;
  Index instance_dim = 0;
  Index num_classes = 0;
  std::vector<Bag> bags;

  Index size() const { return static_cast<Index>(bags.size()); }

  friend bool operator==(const MimlDataset& a, const MimlDataset& b) {
    return a.instance_dim == b.instance_dim &&
           a.num_classes == b.num_classes && a.bags == b.bags;
  }
};

// Checks every bag against the dataset's D and K. Classes with no positive
// bag only produce a warning.
void validate_dataset(const MimlDataset& ds);

// Builds a dataset whose D and K are taken from the first bag and validated
// against the rest.
MimlDataset make_dataset(std::string name, std::vector<Bag> bags);

MimlDataset subset(const MimlDataset& ds, std::span<const std::size_t> indices);

// N x K 0/1 matrix of bag labels.
Matrix label_matrix(const MimlDataset& ds);

enum class DatasetFormat { kCsvBags, kBinaryBags };

std::string_view format_name(DatasetFormat format);
DatasetFormat parse_format(std::string_view name);
// ".mimlb" / ".bin" select the binary format, anything else csv-bags.
DatasetFormat format_for_path(const std::filesystem::path& path);

MimlDataset load_dataset(const std::filesystem::path& path,
                         DatasetFormat format);
void save_dataset(const MimlDataset& ds, const std::filesystem::path& path,
                  DatasetFormat format);

// In-memory variants of the two file formats.
MimlDataset parse_csv_bags(std::string_view text, std::string name = "");
std::string format_csv_bags(const MimlDataset& ds);
MimlDataset parse_binary_bags(std::string_view bytes, std::string name = "");
std::string format_binary_bags(const MimlDataset& ds);

// H x W x C raster stored row-major with interleaved channels.
struct Image {
  Index height = 0;
  Index width = 0;
  Index channels = 1;
  std::vector<double> pixels;

  double at(Index y, Index x, Index c) const {
    return pixels[static_cast<std::size_t>((y * width + x) * channels + c)];
  }
};

enum class PatchMode { kStrip, kGrid };

PatchMode parse_patch_mode(std::string_view name);

// Cuts an image into instances. Strip mode yields H/span row bands of
// span x W x C values; grid mode yields (H/span)(W/span) span x span x C
// tiles in row-major tile order. Each instance is one row of the result.
Matrix patchify_image(const Image& image, PatchMode mode, Index span);

// Inverse of patchify_image.
Image assemble_image(const Matrix& patches, PatchMode mode, Index span,
                     Index height, Index width, Index channels);

struct DatasetSplit {
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> validation_indices;
  std::vector<std::size_t> test_indices;
  std::uint64_t seed = 0;
};

struct SplitFractions {
  double train = 0.6;
  double validation = 0.1;
  double test = 0.3;
};

// Parses "60/10/30" style specs (percentages or fractions).
SplitFractions parse_split_spec(std::string_view spec);

// Uniform random partition with largest-remainder sizing, so each part is
// within one bag of its requested share. `stratified` interleaves bags
// grouped by label vector across the three parts instead.
DatasetSplit split_dataset(const MimlDataset& ds, SplitFractions fractions,
                           std::uint64_t seed, bool stratified = false);

// Permutes the instance order inside every bag; labels are untouched.
MimlDataset shuffle_instances(const MimlDataset& ds, std::uint64_t seed);

struct SyntheticSpec {
  Index num_bags = 200;
  Index instances_per_bag = 4;
  Index dim = 16;
  Index num_classes = 5;
  double noise_std = 0.1;
  std::uint64_t seed = 0;
};

// The planted structure behind a synthetic dataset.
struct SyntheticTruth {
  Matrix prototypes;   // K x D, one row per class
  RowVector background;  // the unlabeled pattern used for distractor slots
};

// Each bag carries between 1 and min(K, n) distinct class prototypes, each
// once, in random slots; the remaining slots hold the shared background
// pattern. Every instance gets isotropic Gaussian noise. Label k is 1 exactly
// when prototype k was planted.
MimlDataset generate_synthetic(const SyntheticSpec& spec,
                               SyntheticTruth* truth = nullptr);

}  // namespace bmiml

#endif  // BMIML_DATASET_H_
