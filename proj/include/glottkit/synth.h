// glottkit/synth.h

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

#ifndef GLOTTKIT_SYNTH_H_
#define GLOTTKIT_SYNTH_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "glottkit/audio.h"
#include "glottkit/fold_models.h"

namespace glottkit {

struct Formant {
  double freq_hz = 0.0;
  double bandwidth_hz = 0.0;
};

// Classical /aa/ fixture.
std::vector<Formant> DefaultVowelTract();

struct Modulation {
  double rate_hz = 0.0;
  double depth_hz = 0.0;
};

struct SynthConfig {
  double duration_sec = 1.0;
  double f0_hz = 120.0;
  int sample_rate = kCanonicalSampleRate;
  std::vector<Formant> tract = DefaultVowelTract();
  std::optional<double> snr_db;
  std::optional<Modulation> modulation;
  std::uint64_t seed = 42;
  double model_dt = 0.02;
  double warmup = 60.0;       // model time discarded before audio starts
  double lead_in_sec = 0.05;  // synthesized then dropped to hide the filter onset
  double peak = 0.9;
};

// Model flow with its cycle rate mapped onto f0 (optionally modulated),
// through an all-pole resonator cascade and a first-difference lip
// radiation, peak-normalized. Throws kUnstableTract for a pole on or
// outside the unit circle and kInvalidArgument for formants at or above
// Nyquist.
AudioBuffer SynthVowel(const OneMassParams& p, const SynthConfig& cfg = {});

// Model flow at audio rate after the time mapping, before the tract.
std::vector<double> SynthFlow(const OneMassParams& p, const SynthConfig& cfg = {});

enum class WavEncoding { kPcm16, kFloat32 };

// Throws kClippedSamples for any sample outside [-1, 1] and kIoError when
// the file cannot be written.
void WriteWav(const AudioBuffer& buf, const std::filesystem::path& path,
              WavEncoding encoding = WavEncoding::kPcm16);

}  // namespace glottkit

#endif  // GLOTTKIT_SYNTH_H_
