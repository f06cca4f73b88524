// core/src/audio.cpp

// Copyright 2026 The Intonate Authors
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

#include "intonate/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

namespace intonate {

namespace {

// All RIFF fields are little-endian; decode byte-wise so the reader does
// not depend on host endianness.
uint32_t ReadU32(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t ReadU16(const unsigned char* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

void PutU32(std::string& out, uint32_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
  out.push_back(static_cast<char>((v >> 16) & 0xFF));
  out.push_back(static_cast<char>((v >> 24) & 0xFF));
}

void PutU16(std::string& out, uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

[[noreturn]] void WavError(const std::filesystem::path& path, const std::string& what) {
  throw std::runtime_error(path.string() + ": " + what);
}

}  // namespace

AudioBuffer load_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) WavError(path, "cannot open file");
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const size_t size = bytes.size();

  if (size < 12 || std::memcmp(p, "RIFF", 4) != 0 || std::memcmp(p + 8, "WAVE", 4) != 0) {
    WavError(path, "not a RIFF/WAVE file");
  }

  bool have_fmt = false;
  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t sample_rate = 0;
  size_t data_offset = 0, data_size = 0;

  size_t pos = 12;
  while (pos + 8 <= size) {
    const char* chunk_id = bytes.data() + pos;
    const uint32_t chunk_size = ReadU32(p + pos + 4);
    const size_t body = pos + 8;
    if (body + chunk_size > size) WavError(path, "truncated chunk");
    if (std::memcmp(chunk_id, "fmt ", 4) == 0) {
      if (chunk_size < 16) WavError(path, "fmt chunk too small");
      format = ReadU16(p + body);
      channels = ReadU16(p + body + 2);
      sample_rate = ReadU32(p + body + 4);
      bits = ReadU16(p + body + 14);
      have_fmt = true;
    } else if (std::memcmp(chunk_id, "data", 4) == 0) {
      data_offset = body;
      data_size = chunk_size;
    }
    pos = body + chunk_size + (chunk_size & 1);  // chunks are word-aligned
  }

  if (!have_fmt) WavError(path, "missing fmt chunk");
  if (data_offset == 0) WavError(path, "missing data chunk");
  if (format != 1) WavError(path, "unsupported encoding (PCM required)");
  if (channels != 1) WavError(path, "mono required, file has " + std::to_string(channels) + " channels");
  if (bits != 16) WavError(path, "16-bit samples required, file has " + std::to_string(bits));
  if (sample_rate == 0) WavError(path, "zero sample rate");
  if (data_size % 2 != 0) WavError(path, "odd data chunk size");

  AudioBuffer audio;
  audio.sample_rate = static_cast<int>(sample_rate);
  const size_t n = data_size / 2;
  audio.samples.resize(n);
  for (size_t i = 0; i < n; ++i) {
    const auto raw = static_cast<int16_t>(ReadU16(p + data_offset + 2 * i));
    audio.samples[i] = static_cast<float>(raw) / 32768.0f;
  }
  return audio;
}

void save_wav(const std::filesystem::path& path, const AudioBuffer& audio) {
  if (audio.sample_rate <= 0) {
    throw std::invalid_argument("save_wav: sample_rate must be positive");
  }
  const uint32_t data_size = static_cast<uint32_t>(audio.samples.size() * 2);
  std::string out;
  out.reserve(44 + data_size);
  out += "RIFF";
  PutU32(out, 36 + data_size);
  out += "WAVE";
  out += "fmt ";
  PutU32(out, 16);
  PutU16(out, 1);  // PCM
  PutU16(out, 1);  // mono
  PutU32(out, static_cast<uint32_t>(audio.sample_rate));
  PutU32(out, static_cast<uint32_t>(audio.sample_rate) * 2);  // byte rate
  PutU16(out, 2);   // block align
  PutU16(out, 16);  // bits per sample
  out += "data";
  PutU32(out, data_size);
  for (const float s : audio.samples) {
    const double scaled = std::lround(static_cast<double>(s) * 32768.0);
    const auto v = static_cast<int16_t>(std::clamp(scaled, -32768.0, 32767.0));
    PutU16(out, static_cast<uint16_t>(v));
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) {
    throw std::runtime_error("cannot write " + path.string());
  }
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
}

}  // namespace intonate
