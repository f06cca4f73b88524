// core/include/intonate/text.hpp

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

#ifndef INTONATE_TEXT_HPP_
#define INTONATE_TEXT_HPP_

#include <string>
#include <string_view>
#include <vector>

namespace intonate {

// Splits UTF-8 text into code points, each returned as its UTF-8 byte
// sequence. Bytes that do not form a valid sequence are passed through
// one at a time so garbled input still tokenizes deterministically.
std::vector<std::string> utf8_chars(std::string_view text);

// True for the sentence-final punctuation set: fullwidth 。，？！ and
// ASCII . , ? !  Interior punctuation is none of this function's business.
bool is_end_punctuation(std::string_view ch);

// Removes the trailing run of end punctuation. "他去学校？" -> "他去学校".
std::string strip_trailing_punctuation(std::string_view text);

}  // namespace intonate

#endif  // INTONATE_TEXT_HPP_
