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

#include "bmiml/netpbm.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "bmiml/binary_io.h"
#include "bmiml/errors.h"

namespace bmiml {

namespace {

class HeaderReader {
 public:
  explicit HeaderReader(std::string_view bytes) : bytes_(bytes) {}

  long next_int(const char* what) {
    skip_space_and_comments();
    long v = 0;
    std::size_t digits = 0;
    while (pos_ < bytes_.size() &&
           std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      v = v * 10 + (bytes_[pos_++] - '0');
      require(v <= 1L << 30, ErrorKind::kParse,
              std::string("netpbm: ") + what + " too large");
      ++digits;
    }
    require(digits > 0, ErrorKind::kParse,
            std::string("netpbm: expected ") + what + " at byte " +
                std::to_string(pos_));
    return v;
  }

  std::size_t pos() const { return pos_; }
  void advance(std::size_t n) { pos_ += n; }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

Image parse_netpbm(std::string_view bytes) {
  require(bytes.size() >= 2 && bytes[0] == 'P', ErrorKind::kParse,
          "netpbm: missing P2/P3/P5/P6 magic");
  const char kind = bytes[1];
  require(kind == '2' || kind == '3' || kind == '5' || kind == '6',
          ErrorKind::kParse,
          std::string("netpbm: unsupported variant P") + kind);
  const bool ascii = kind == '2' || kind == '3';
  HeaderReader h(bytes);
  h.advance(2);
  Image img;
  img.channels = (kind == '3' || kind == '6') ? 3 : 1;
  img.width = h.next_int("width");
  img.height = h.next_int("height");
  const long maxval = h.next_int("maxval");
  require(img.width > 0 && img.height > 0, ErrorKind::kParse,
          "netpbm: empty image");
  require(maxval >= 1 && maxval <= 65535, ErrorKind::kParse,
          "netpbm: maxval out of range");
  const auto count =
      static_cast<std::size_t>(img.width * img.height * img.channels);
  img.pixels.resize(count);
  const double scale = 1.0 / static_cast<double>(maxval);
  if (ascii) {
    for (std::size_t i = 0; i < count; ++i) {
      const long v = h.next_int("sample");
      require(v <= maxval, ErrorKind::kParse, "netpbm: sample exceeds maxval");
      img.pixels[i] = static_cast<double>(v) * scale;
    }
    return img;
  }
  // Exactly one whitespace byte separates the header from the raster.
  h.advance(1);
  const std::size_t width = maxval < 256 ? 1 : 2;
  require(h.pos() <= bytes.size() && bytes.size() - h.pos() >= count * width,
          ErrorKind::kParse, "netpbm: raster is truncated");
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + h.pos());
  for (std::size_t i = 0; i < count; ++i) {
    const unsigned v = width == 1 ? p[i] : (p[2 * i] << 8u) | p[2 * i + 1];
    require(v <= static_cast<unsigned>(maxval), ErrorKind::kParse,
            "netpbm: sample exceeds maxval");
    img.pixels[i] = static_cast<double>(v) * scale;
  }
  return img;
}

Image read_netpbm(const std::filesystem::path& path) {
  try {
    return parse_netpbm(read_file(path));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kParse) throw;
    fail(ErrorKind::kParse, path.string() + ": " + e.what());
  }
}

std::string format_netpbm(const Image& image) {
  require(image.channels == 1 || image.channels == 3,
          ErrorKind::kInvalidArgument, "netpbm: need 1 or 3 channels");
  std::string out = image.channels == 1 ? "P5\n" : "P6\n";
  out += std::to_string(image.width) + " " + std::to_string(image.height) +
         "\n255\n";
  for (double v : image.pixels) {
    const double c = std::clamp(v, 0.0, 1.0);
    out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(c * 255.0))));
  }
  return out;
}

}  // namespace bmiml
