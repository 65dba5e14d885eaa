// glottkit/spectral.cc

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

#include "glottkit/spectral.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <unsupported/Eigen/FFT>

#include "glottkit/error.h"

namespace glottkit {

std::vector<std::complex<double>> RealFft(std::span<const double> x,
                                          std::size_t nfft) {
  std::vector<double> padded(nfft, 0.0);
  std::copy_n(x.begin(), std::min(x.size(), nfft), padded.begin());
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> full;
  fft.fwd(full, padded);
  full.resize(nfft / 2 + 1);
  return full;
}

std::vector<double> HannWindow(std::size_t n) {
  std::vector<double> w(n, 1.0);
  if (n < 2) return w;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                static_cast<double>(n - 1));
  }
  return w;
}

std::size_t NextPow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

namespace {

RowMatrix SpectrogramAt(std::span<const double> x, std::size_t window_len,
                        std::size_t hop, std::size_t nfft, std::size_t offset,
                        std::size_t n_frames) {
  const std::vector<double> win = HannWindow(window_len);
  const std::size_t bins = nfft / 2 + 1;
  RowMatrix out(static_cast<Eigen::Index>(n_frames),
                static_cast<Eigen::Index>(bins));
  std::vector<double> seg(window_len);
  for (std::size_t t = 0; t < n_frames; ++t) {
    const std::size_t start = offset + t * hop;
    for (std::size_t i = 0; i < window_len; ++i) seg[i] = x[start + i] * win[i];
    const auto spec = RealFft(seg, nfft);
    for (std::size_t k = 0; k < bins; ++k) {
      out(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(k)) =
          std::abs(spec[k]);
    }
  }
  return out;
}

void CheckResolution(std::size_t window_len, std::size_t hop, std::size_t nfft) {
  if (window_len == 0 || hop == 0 || hop > window_len) {
    throw Error(ErrorKind::kBadWindow,
                "hop " + std::to_string(hop) + " with window " +
                    std::to_string(window_len));
  }
  if (nfft < window_len) {
    throw Error(ErrorKind::kBadWindow, "nfft smaller than window");
  }
}

}  // namespace

RowMatrix Spectrogram(const AudioBuffer& buf, std::size_t window_len,
                      std::size_t hop, std::size_t nfft) {
  CheckResolution(window_len, hop, nfft);
  const std::size_t n = NumFrames(buf.samples.size(), window_len, hop);
  return SpectrogramAt(buf.samples, window_len, hop, nfft, 0, n);
}

std::vector<StftResolution> DefaultStackResolutions() {
  return {{128, 80, 512}, {256, 80, 512}, {512, 80, 512}};
}

RepresentationStack BuildStack(const AudioBuffer& buf,
                               const std::vector<StftResolution>& resolutions) {
  if (resolutions.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "stack needs >= 1 resolution");
  }
  std::size_t longest = 0;
  for (const auto& r : resolutions) {
    CheckResolution(r.window_len, r.hop, r.nfft);
    longest = std::max(longest, r.window_len);
  }
  // Frame t of every layer is centred at t*hop_l + longest/2; the common count
  // is the minimum over layers.
  std::size_t n_frames = static_cast<std::size_t>(-1);
  for (const auto& r : resolutions) {
    const std::size_t offset = (longest - r.window_len) / 2;
    const std::size_t avail =
        buf.samples.size() >= offset
            ? NumFrames(buf.samples.size() - offset, r.window_len, r.hop)
            : 0;
    n_frames = std::min(n_frames, avail);
  }
  RepresentationStack stack;
  for (const auto& r : resolutions) {
    const std::size_t offset = (longest - r.window_len) / 2;
    stack.layers.push_back(SpectrogramAt(buf.samples, r.window_len, r.hop,
                                         r.nfft, offset, n_frames));
    stack.descriptors.push_back(r);
  }
  return stack;
}

std::vector<double> CepstralFeatures(std::span<const double> frame,
                                     double sample_rate, int n_mel, int n_cep,
                                     double log_floor) {
  if (n_mel < 1 || n_cep < 1 || n_cep > n_mel) {
    throw Error(ErrorKind::kInvalidArgument, "need 1 <= n_cep <= n_mel");
  }
  const std::size_t nfft = NextPow2(std::max<std::size_t>(frame.size(), 2));
  const std::vector<double> win = HannWindow(frame.size());
  std::vector<double> seg(frame.size());
  for (std::size_t i = 0; i < frame.size(); ++i) seg[i] = frame[i] * win[i];
  const auto spec = RealFft(seg, nfft);
  const std::size_t bins = nfft / 2 + 1;

  auto hz_to_mel = [](double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); };
  auto mel_to_hz = [](double mel) {
    return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
  };
  const double mel_hi = hz_to_mel(sample_rate / 2.0);
  std::vector<double> edges(static_cast<std::size_t>(n_mel) + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = mel_to_hz(mel_hi * static_cast<double>(i) /
                         static_cast<double>(n_mel + 1));
  }

  std::vector<double> log_energy(static_cast<std::size_t>(n_mel));
  for (int m = 0; m < n_mel; ++m) {
    const double lo = edges[static_cast<std::size_t>(m)];
    const double mid = edges[static_cast<std::size_t>(m) + 1];
    const double hi = edges[static_cast<std::size_t>(m) + 2];
    double e = 0.0;
    for (std::size_t k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate /
                       static_cast<double>(nfft);
      double w = 0.0;
      if (f > lo && f <= mid) {
        w = (f - lo) / (mid - lo);
      } else if (f > mid && f < hi) {
        w = (hi - f) / (hi - mid);
      }
      if (w > 0.0) e += w * std::norm(spec[k]);
    }
    log_energy[static_cast<std::size_t>(m)] = std::log(std::max(e, log_floor));
  }

  std::vector<double> cep(static_cast<std::size_t>(n_cep));
  for (int k = 0; k < n_cep; ++k) {
    double acc = 0.0;
    for (int m = 0; m < n_mel; ++m) {
      acc += log_energy[static_cast<std::size_t>(m)] *
             std::cos(std::numbers::pi * k * (m + 0.5) / n_mel);
    }
    cep[static_cast<std::size_t>(k)] = acc;
  }
  return cep;
}

}  // namespace glottkit
