// core/include/intonate/audio.hpp

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

#ifndef INTONATE_AUDIO_HPP_
#define INTONATE_AUDIO_HPP_

#include <cstddef>
#include <filesystem>
#include <vector>

namespace intonate {

struct AudioBuffer {
  std::vector<float> samples;  // amplitudes in [-1, 1]
  int sample_rate = 0;

  double duration() const {
    return sample_rate > 0
               ? static_cast<double>(samples.size()) / sample_rate
               : 0.0;
  }
};

// Reads a RIFF/WAVE file. Only mono 16-bit PCM is accepted; anything else
// (stereo, float, ADPCM, truncated payload) throws std::runtime_error.
// Samples are scaled to [-1, 1] by 1/32768.
AudioBuffer load_wav(const std::filesystem::path& path);

// Writes mono 16-bit PCM. Samples are scaled by 32768 and clamped to the
// int16 range, the inverse of load_wav up to clamping at +1.0.
void save_wav(const std::filesystem::path& path, const AudioBuffer& audio);

}  // namespace intonate

#endif  // INTONATE_AUDIO_HPP_
