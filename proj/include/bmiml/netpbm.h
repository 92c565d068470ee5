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

#ifndef BMIML_NETPBM_H_
#define BMIML_NETPBM_H_

#include <filesystem>
#include <string>
#include <string_view>

#include "bmiml/dataset.h"

namespace bmiml {

// Portable graymap / pixmap (P2, P3, P5, P6). Samples are scaled to [0, 1]
// by the file's maxval.
Image parse_netpbm(std::string_view bytes);
Image read_netpbm(const std::filesystem::path& path);

// Binary P5 (1 channel) or P6 (3 channels) with maxval 255; samples are
// clamped to [0, 1] and rounded.
std::string format_netpbm(const Image& image);

}  // namespace bmiml

#endif  // BMIML_NETPBM_H_
