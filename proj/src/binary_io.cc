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

#include "bmiml/binary_io.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

namespace bmiml {

void ByteWriter::put_u32(std::uint32_t v) {
  for (int i = 0; i < 4; ++i) put_u8(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::put_u64(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) put_u8(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::put_f64(double v) { put_u64(std::bit_cast<std::uint64_t>(v)); }

void ByteWriter::put_string(std::string_view s) {
  require(s.size() <= std::numeric_limits<std::uint32_t>::max(),
          ErrorKind::kInvalidArgument, "string too long to encode");
  put_u32(static_cast<std::uint32_t>(s.size()));
  put_bytes(s);
}

void ByteWriter::put_matrix(const Matrix& m) {
  put_u32(static_cast<std::uint32_t>(m.rows()));
  put_u32(static_cast<std::uint32_t>(m.cols()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) put_f64(m(i, j));
}

void ByteReader::need(std::size_t n, const char* what) {
  if (bytes_.size() - pos_ < n) {
    fail(kind_, std::string("unexpected end of data reading ") + what +
                    " at offset " + std::to_string(pos_));
  }
}

std::uint8_t ByteReader::get_u8() {
  need(1, "u8");
  return static_cast<std::uint8_t>(bytes_[pos_++]);
}

std::uint32_t ByteReader::get_u32() {
  need(4, "u32");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i)
    v |= static_cast<std::uint32_t>(
             static_cast<std::uint8_t>(bytes_[pos_ + i]))
         << (8 * i);
  pos_ += 4;
  return v;
}

std::uint64_t ByteReader::get_u64() {
  need(8, "u64");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i)
    v |= static_cast<std::uint64_t>(
             static_cast<std::uint8_t>(bytes_[pos_ + i]))
         << (8 * i);
  pos_ += 8;
  return v;
}

double ByteReader::get_f64() { return std::bit_cast<double>(get_u64()); }

std::string_view ByteReader::get_bytes(std::size_t n) {
  need(n, "bytes");
  std::string_view out = bytes_.substr(pos_, n);
  pos_ += n;
  return out;
}

std::string ByteReader::get_string() {
  const std::uint32_t n = get_u32();
  return std::string(get_bytes(n));
}

Matrix ByteReader::get_matrix() {
  const std::uint32_t rows = get_u32();
  const std::uint32_t cols = get_u32();
  const std::uint64_t count = static_cast<std::uint64_t>(rows) * cols;
  if (count > remaining() / 8) {
    fail(kind_, "matrix of " + std::to_string(rows) + "x" +
                    std::to_string(cols) + " exceeds remaining data at offset " +
                    std::to_string(pos_));
  }
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = get_f64();
  return m;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open '" + path.string() + "'");
  std::string data((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  if (in.bad()) fail(ErrorKind::kIo, "read failed for '" + path.string() + "'");
  return data;
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    fail(ErrorKind::kIo, "cannot open '" + path.string() + "' for writing");
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) fail(ErrorKind::kIo, "write failed for '" + path.string() + "'");
}

}  // namespace bmiml
