// Copyright 2026 The vcforge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef VCFORGE_BINARY_IO_HPP_
#define VCFORGE_BINARY_IO_HPP_

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "vcforge/common.hpp"

// Little-endian primitives shared by the VCFT/VCGM/VCNN file formats.

namespace vc::bio {

inline std::uint32_t to_le32(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    return __builtin_bswap32(v);
  }
  return v;
}

inline std::uint64_t to_le64(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    return __builtin_bswap64(v);
  }
  return v;
}

inline void put_u32(std::ostream& os, std::uint32_t v) {
  std::uint32_t le = to_le32(v);
  os.write(reinterpret_cast<const char*>(&le), sizeof(le));
}

inline void put_f64(std::ostream& os, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  bits = to_le64(bits);
  os.write(reinterpret_cast<const char*>(&bits), sizeof(bits));
}

inline std::uint32_t get_u32(std::istream& is, const char* what) {
  std::uint32_t le = 0;
  is.read(reinterpret_cast<char*>(&le), sizeof(le));
  if (!is) throw IoError(std::string("truncated file while reading ") + what);
  return to_le32(le);
}

inline double get_f64(std::istream& is, const char* what) {
  std::uint64_t le = 0;
  is.read(reinterpret_cast<char*>(&le), sizeof(le));
  if (!is) throw IoError(std::string("truncated file while reading ") + what);
  le = to_le64(le);
  double v;
  std::memcpy(&v, &le, sizeof(v));
  return v;
}

inline void put_magic(std::ostream& os, const char magic[4]) {
  os.write(magic, 4);
}

inline void check_magic(std::istream& is, const char magic[4],
                        const char* format_name) {
  char buf[4] = {0, 0, 0, 0};
  is.read(buf, 4);
  if (!is || std::memcmp(buf, magic, 4) != 0) {
    throw FormatError(std::string("bad magic number: not a ") + format_name +
                      " file");
  }
}

}  // namespace vc::bio

#endif  // VCFORGE_BINARY_IO_HPP_
