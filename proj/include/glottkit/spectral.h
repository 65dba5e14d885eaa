// glottkit/spectral.h

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

#ifndef GLOTTKIT_SPECTRAL_H_
#define GLOTTKIT_SPECTRAL_H_

#include <complex>
#include <span>
#include <vector>

#include "glottkit/audio.h"

namespace glottkit {

// Forward DFT of a real sequence zero-padded to `nfft`; returns nfft/2 + 1 bins.
std::vector<std::complex<double>> RealFft(std::span<const double> x,
                                          std::size_t nfft);

// Symmetric Hann window of length n.
std::vector<double> HannWindow(std::size_t n);

std::size_t NextPow2(std::size_t n);

struct StftResolution {
  std::size_t window_len = 256;
  std::size_t hop = 80;
  std::size_t nfft = 512;
};

// Hann-windowed magnitude spectrogram, n_frames x (nfft/2 + 1). Throws
// kBadWindow when hop > window_len or nfft < window_len.
RowMatrix Spectrogram(const AudioBuffer& buf, std::size_t window_len,
                      std::size_t hop, std::size_t nfft);

// Layers share n_frames. Frames of shorter windows are centred on the frames
// of the longest window so that all layers describe the same instants.
struct RepresentationStack {
  std::vector<RowMatrix> layers;
  std::vector<StftResolution> descriptors;

  std::size_t num_frames() const {
    return layers.empty() ? 0 : static_cast<std::size_t>(layers[0].rows());
  }
};

std::vector<StftResolution> DefaultStackResolutions();

RepresentationStack BuildStack(const AudioBuffer& buf,
                               const std::vector<StftResolution>& resolutions);

struct CepstralConfig {
  int n_mel = 26;
  int n_cep = 13;
  double log_floor = 1e-10;
};

// Log-mel filterbank (n_mel triangles spanning 0..rate/2) followed by DCT-II,
// first n_cep coefficients.
std::vector<double> CepstralFeatures(std::span<const double> frame,
                                     double sample_rate, int n_mel, int n_cep,
                                     double log_floor = 1e-10);

}  // namespace glottkit

#endif  // GLOTTKIT_SPECTRAL_H_
