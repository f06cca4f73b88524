// core/src/text.cpp

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

#include "intonate/text.hpp"

#include <array>

namespace intonate {

namespace {

// Expected length of a UTF-8 sequence given its lead byte, 0 for
// continuation or invalid lead bytes.
int Utf8SequenceLength(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead & 0xE0) == 0xC0) return 2;
  if ((lead & 0xF0) == 0xE0) return 3;
  if ((lead & 0xF8) == 0xF0) return 4;
  return 0;
}

bool IsContinuation(unsigned char b) { return (b & 0xC0) == 0x80; }

}  // namespace

std::vector<std::string> utf8_chars(std::string_view text) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < text.size()) {
    const int len = Utf8SequenceLength(static_cast<unsigned char>(text[i]));
    if (len <= 1) {
      out.emplace_back(text.substr(i, 1));
      ++i;
      continue;
    }
    bool valid = i + len <= text.size();
    for (int k = 1; valid && k < len; ++k) {
      valid = IsContinuation(static_cast<unsigned char>(text[i + k]));
    }
    if (!valid) {
      out.emplace_back(text.substr(i, 1));
      ++i;
      continue;
    }
    out.emplace_back(text.substr(i, len));
    i += len;
  }
  return out;
}

bool is_end_punctuation(std::string_view ch) {
  static const std::array<std::string_view, 8> kSet = {
      "。",  // 。
      "，",  // ，
      "？",  // ？
      "！",  // ！
      ".", ",", "?", "!"};
  for (const auto& p : kSet) {
    if (ch == p) return true;
  }
  return false;
}

std::string strip_trailing_punctuation(std::string_view text) {
  const std::vector<std::string> chars = utf8_chars(text);
  size_t end = chars.size();
  while (end > 0 && is_end_punctuation(chars[end - 1])) --end;
  std::string out;
  for (size_t i = 0; i < end; ++i) out += chars[i];
  return out;
}

}  // namespace intonate
