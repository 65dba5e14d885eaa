// glottkit/audio.h

// Copyright 2026 The glottkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GLOTTKIT_AUDIO_H_
#define GLOTTKIT_AUDIO_H_

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace glottkit {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Mono recording. Samples are finite and lie in [-1, 1].
struct AudioBuffer {
  std::vector<double> samples;
  int sample_rate = 16000;

  std::size_t size() const { return samples.size(); }
  double duration() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

// n_frames = floor((len - frame_len) / hop) + 1 for len >= frame_len, else 0.
struct FrameSet {
  RowMatrix frames;  // n_frames x frame_len
  std::size_t hop = 0;
  std::size_t frame_len = 0;
  int sample_rate = 0;

  std::size_t num_frames() const {
    return static_cast<std::size_t>(frames.rows());
  }
};

inline constexpr int kCanonicalSampleRate = 16000;

// Accepts mono RIFF/WAVE with 16-bit integer or 32-bit float PCM only.
// PCM16 samples are scaled by 1/32768.
AudioBuffer ReadWav(const std::filesystem::path& path);

// Band-limited resampling with a 64-tap Kaiser (beta = 8) windowed sinc,
// cutoff 0.45 * min(source, target) Hz.
AudioBuffer Resample(const AudioBuffer& buf, int target_rate);

// y[0] = x[0], y[n] = x[n] - coeff * x[n-1].
AudioBuffer Preemphasis(const AudioBuffer& buf, double coeff);

FrameSet Frame(const AudioBuffer& buf, std::size_t frame_len, std::size_t hop);
// Same framing for a bare sample span.
FrameSet Frame(std::span<const double> samples, int sample_rate,
               std::size_t frame_len, std::size_t hop);

std::size_t NumFrames(std::size_t len, std::size_t frame_len, std::size_t hop);

}  // namespace glottkit

#endif  // GLOTTKIT_AUDIO_H_
