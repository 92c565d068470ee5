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

#ifndef BMIML_BINARY_IO_H_
#define BMIML_BINARY_IO_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "bmiml/errors.h"
#include "bmiml/numerics.h"

namespace bmiml {

// Little-endian encoder independent of host byte order.
class ByteWriter {
 public:
  void put_u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void put_u32(std::uint32_t v);
  void put_u64(std::uint64_t v);
  void put_f64(double v);
  void put_bytes(std::string_view bytes) { buf_.append(bytes); }
  // u32 length prefix then raw bytes.
  void put_string(std::string_view s);
  // u32 rows, u32 cols, then row-major f64 values.
  void put_matrix(const Matrix& m);

  const std::string& bytes() const { return buf_; }
  std::string take() { return std::move(buf_); }

 private:
  std::string buf_;
};

// Bounds-checked decoder. Running past the end raises `error_kind` with the
// failing offset in the message.
class ByteReader {
 public:
  explicit ByteReader(std::string_view bytes,
                      ErrorKind error_kind = ErrorKind::kParse)
      : bytes_(bytes), kind_(error_kind) {}

  std::uint8_t get_u8();
  std::uint32_t get_u32();
  std::uint64_t get_u64();
  double get_f64();
  std::string_view get_bytes(std::size_t n);
  std::string get_string();
  Matrix get_matrix();

  std::size_t offset() const { return pos_; }
  bool at_end() const { return pos_ == bytes_.size(); }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n, const char* what);

  std::string_view bytes_;
  std::size_t pos_ = 0;
  ErrorKind kind_;
};

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace bmiml

#endif  // BMIML_BINARY_IO_H_
