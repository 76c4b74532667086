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

#include "vcforge/wav.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "vcforge/binary_io.hpp"
#include "vcforge/common.hpp"

namespace vc {

namespace {

std::uint16_t get_u16(std::istream& is, const char* what) {
  unsigned char b[2];
  is.read(reinterpret_cast<char*>(b), 2);
  if (!is) throw IoError(std::string("truncated wav while reading ") + what);
  return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

std::uint32_t get_u32(std::istream& is, const char* what) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  if (!is) throw IoError(std::string("truncated wav while reading ") + what);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_u16(std::ostream& os, std::uint16_t v) {
  char b[2] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff)};
  os.write(b, 2);
}

void put_u32(std::ostream& os, std::uint32_t v) {
  char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
               static_cast<char>((v >> 16) & 0xff),
               static_cast<char>((v >> 24) & 0xff)};
  os.write(b, 4);
}

}  // namespace

Audio read_wav(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open wav file: " + path);

  char riff[4];
  is.read(riff, 4);
  if (!is || std::memcmp(riff, "RIFF", 4) != 0) {
    throw FormatError(path + ": not a RIFF file");
  }
  get_u32(is, "riff size");
  char wave[4];
  is.read(wave, 4);
  if (!is || std::memcmp(wave, "WAVE", 4) != 0) {
    throw FormatError(path + ": not a WAVE file");
  }

  bool have_fmt = false;
  std::uint16_t channels = 0, bits = 0, format_tag = 0;
  std::uint32_t sample_rate = 0;
  Audio audio;

  // Walk chunks until the data chunk; tolerate extra chunks (LIST, fact...).
  while (true) {
    char id[4];
    is.read(id, 4);
    if (!is) {
      throw FormatError(path + ": no data chunk found");
    }
    std::uint32_t chunk_size = get_u32(is, "chunk size");
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (chunk_size < 16) throw FormatError(path + ": fmt chunk too small");
      format_tag = get_u16(is, "format tag");
      channels = get_u16(is, "channels");
      sample_rate = get_u32(is, "sample rate");
      get_u32(is, "byte rate");
      get_u16(is, "block align");
      bits = get_u16(is, "bits per sample");
      if (chunk_size > 16) is.seekg(chunk_size - 16, std::ios::cur);
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      if (!have_fmt) throw FormatError(path + ": data chunk before fmt");
      if (format_tag != 1) {
        throw FormatError(path + ": unsupported encoding (PCM required)");
      }
      if (bits != 16) {
        throw FormatError(path + ": unsupported sample width (16-bit "
                          "required)");
      }
      if (channels != 1) {
        throw FormatError(path + ": unsupported channel count " +
                          std::to_string(channels) + " (mono required)");
      }
      std::size_t n = chunk_size / 2;
      audio.samples.resize(n);
      std::vector<char> raw(chunk_size);
      is.read(raw.data(), static_cast<std::streamsize>(chunk_size));
      if (static_cast<std::uint32_t>(is.gcount()) != chunk_size) {
        throw IoError(path + ": truncated data chunk");
      }
      for (std::size_t i = 0; i < n; ++i) {
        auto lo = static_cast<unsigned char>(raw[2 * i]);
        auto hi = static_cast<unsigned char>(raw[2 * i + 1]);
        auto s = static_cast<std::int16_t>(lo | (hi << 8));
        audio.samples[i] = static_cast<double>(s) / 32768.0;
      }
      audio.sample_rate = static_cast<int>(sample_rate);
      return audio;
    } else {
      // Skip unknown chunk (chunks are word-aligned).
      is.seekg(chunk_size + (chunk_size & 1), std::ios::cur);
      if (!is) throw IoError(path + ": truncated while skipping chunk");
    }
  }
}

void write_wav(const Audio& audio, const std::string& path) {
  if (audio.sample_rate <= 0) {
    throw ValidationError("write_wav: sample rate must be positive");
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path);

  auto n = static_cast<std::uint32_t>(audio.samples.size());
  std::uint32_t data_bytes = n * 2;
  os.write("RIFF", 4);
  put_u32(os, 36 + data_bytes);
  os.write("WAVE", 4);
  os.write("fmt ", 4);
  put_u32(os, 16);
  put_u16(os, 1);  // PCM
  put_u16(os, 1);  // mono
  put_u32(os, static_cast<std::uint32_t>(audio.sample_rate));
  put_u32(os, static_cast<std::uint32_t>(audio.sample_rate) * 2);
  put_u16(os, 2);
  put_u16(os, 16);
  os.write("data", 4);
  put_u32(os, data_bytes);
  for (double v : audio.samples) {
    double clamped = v < -1.0 ? -1.0 : (v > 1.0 ? 1.0 : v);
    auto q = static_cast<int>(std::lround(clamped * 32767.0));
    put_u16(os, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
  }
  if (!os) throw IoError("write failed: " + path);
}

}  // namespace vc
