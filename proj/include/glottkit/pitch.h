// glottkit/pitch.h

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

#ifndef GLOTTKIT_PITCH_H_
#define GLOTTKIT_PITCH_H_

#include <optional>
#include <span>
#include <vector>

#include "glottkit/audio.h"

namespace glottkit {

inline constexpr double kUnvoicedThreshold = 0.3;

// Normalized-autocorrelation pitch estimate over lags [rate/fmax, rate/fmin]
// with parabolic peak interpolation. Returns nullopt (unvoiced) when the peak
// value is below kUnvoicedThreshold. Among local maxima within 3% of the
// band maximum the shortest lag wins, which suppresses sub-octave picks.
std::optional<double> EstimateF0(std::span<const double> frame,
                                 double sample_rate, double fmin, double fmax);

struct F0Contour {
  std::vector<double> f0;     // 0 for unvoiced frames
  std::vector<bool> voiced;
  double frame_rate = 0.0;    // frames per second

  double voiced_fraction() const;
};

struct PitchTrackConfig {
  double fmin = 60.0;
  double fmax = 400.0;
  double frame_sec = 0.025;
  double hop_sec = 0.010;
};

F0Contour TrackF0(const AudioBuffer& buf, const PitchTrackConfig& cfg = {});

struct TremorConfig {
  PitchTrackConfig pitch;
  double band_lo_hz = 0.5;
  double band_split_hz = 4.0;
  double band_hi_hz = 12.0;
  double min_voiced_fraction = 0.5;
  // Contours whose interpolated RMS deviation is below this are treated as
  // unmodulated and score 0.
  double min_modulation_hz = 0.05;
};

// Share of f0-contour modulation energy in [0.5, 4) Hz relative to
// [0.5, 12] Hz. Throws kInsufficientVoicing below the voiced-fraction bound.
double TremorIndex(const AudioBuffer& buf, const TremorConfig& cfg = {});

}  // namespace glottkit

#endif  // GLOTTKIT_PITCH_H_
