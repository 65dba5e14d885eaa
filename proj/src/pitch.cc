// glottkit/pitch.cc

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

#include "glottkit/pitch.h"

#include <algorithm>
#include <cmath>

#include "glottkit/error.h"
#include "glottkit/spectral.h"

namespace glottkit {

std::optional<double> EstimateF0(std::span<const double> frame,
                                 double sample_rate, double fmin, double fmax) {
  if (!(fmin > 0.0 && fmin < fmax && fmax < sample_rate / 2.0)) {
    throw Error(ErrorKind::kInvalidArgument,
                "need 0 < fmin < fmax < sample_rate/2");
  }
  const std::size_t n = frame.size();
  const auto lag_lo = static_cast<std::size_t>(std::floor(sample_rate / fmax));
  auto lag_hi = static_cast<std::size_t>(std::ceil(sample_rate / fmin));
  if (lag_lo < 2 || lag_lo + 2 >= n) return std::nullopt;
  lag_hi = std::min(lag_hi, n - 2);

  // Normalized autocorrelation on [lag_lo-1, lag_hi+1].
  std::vector<double> nac(lag_hi + 2, 0.0);
  for (std::size_t lag = lag_lo - 1; lag <= lag_hi + 1; ++lag) {
    double xy = 0.0, xx = 0.0, yy = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) {
      xy += frame[i] * frame[i + lag];
      xx += frame[i] * frame[i];
      yy += frame[i + lag] * frame[i + lag];
    }
    const double denom = std::sqrt(xx * yy);
    nac[lag] = denom > 0.0 ? xy / denom : 0.0;
  }

  double best = -1.0;
  for (std::size_t lag = lag_lo; lag <= lag_hi; ++lag) best = std::max(best, nac[lag]);
  if (!(best >= kUnvoicedThreshold)) return std::nullopt;

  std::size_t pick = 0;
  for (std::size_t lag = lag_lo; lag <= lag_hi; ++lag) {
    const bool local_max = nac[lag] >= nac[lag - 1] && nac[lag] >= nac[lag + 1];
    if (local_max && nac[lag] >= 0.97 * best) {
      pick = lag;
      break;
    }
  }
  if (pick == 0) return std::nullopt;

  const double ym = nac[pick - 1], y0 = nac[pick], yp = nac[pick + 1];
  const double curv = ym - 2.0 * y0 + yp;
  double shift = 0.0;
  if (curv < 0.0) shift = std::clamp(0.5 * (ym - yp) / curv, -0.5, 0.5);
  return sample_rate / (static_cast<double>(pick) + shift);
}

double F0Contour::voiced_fraction() const {
  if (voiced.empty()) return 0.0;
  return static_cast<double>(std::count(voiced.begin(), voiced.end(), true)) /
         static_cast<double>(voiced.size());
}

F0Contour TrackF0(const AudioBuffer& buf, const PitchTrackConfig& cfg) {
  const auto frame_len =
      static_cast<std::size_t>(std::lround(cfg.frame_sec * buf.sample_rate));
  const auto hop =
      static_cast<std::size_t>(std::lround(cfg.hop_sec * buf.sample_rate));
  F0Contour contour;
  contour.frame_rate = static_cast<double>(buf.sample_rate) /
                       static_cast<double>(hop);
  const std::size_t n = NumFrames(buf.samples.size(), frame_len, hop);
  contour.f0.resize(n, 0.0);
  contour.voiced.resize(n, false);
  const std::span<const double> all(buf.samples);
  for (std::size_t t = 0; t < n; ++t) {
    const auto f0 = EstimateF0(all.subspan(t * hop, frame_len), buf.sample_rate,
                               cfg.fmin, cfg.fmax);
    if (f0) {
      contour.f0[t] = *f0;
      contour.voiced[t] = true;
    }
  }
  return contour;
}

double TremorIndex(const AudioBuffer& buf, const TremorConfig& cfg) {
  const F0Contour contour = TrackF0(buf, cfg.pitch);
  const std::size_t n = contour.f0.size();
  if (n == 0 || contour.voiced_fraction() < cfg.min_voiced_fraction) {
    throw Error(ErrorKind::kInsufficientVoicing,
                "voiced fraction " + std::to_string(contour.voiced_fraction()));
  }

  // Fill unvoiced gaps by linear interpolation; edges hold the nearest value.
  std::vector<double> f0 = contour.f0;
  std::vector<std::size_t> idx;
  for (std::size_t t = 0; t < n; ++t) {
    if (contour.voiced[t]) idx.push_back(t);
  }
  for (std::size_t t = 0; t < n; ++t) {
    if (contour.voiced[t]) continue;
    const auto hi = std::lower_bound(idx.begin(), idx.end(), t);
    if (hi == idx.begin()) {
      f0[t] = contour.f0[*hi];
    } else if (hi == idx.end()) {
      f0[t] = contour.f0[idx.back()];
    } else {
      const std::size_t b = *hi, a = *(hi - 1);
      const double w = static_cast<double>(t - a) / static_cast<double>(b - a);
      f0[t] = (1.0 - w) * contour.f0[a] + w * contour.f0[b];
    }
  }

  double mean = 0.0;
  for (double v : f0) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double& v : f0) {
    v -= mean;
    var += v * v;
  }
  if (std::sqrt(var / static_cast<double>(n)) < cfg.min_modulation_hz) {
    return 0.0;
  }

  const std::size_t nfft = NextPow2(std::max<std::size_t>(8 * n, 1024));
  const auto spec = RealFft(f0, nfft);
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const double f = static_cast<double>(k) * contour.frame_rate /
                     static_cast<double>(nfft);
    if (f < cfg.band_lo_hz || f > cfg.band_hi_hz) continue;
    const double e = std::norm(spec[k]);
    den += e;
    if (f < cfg.band_split_hz) num += e;
  }
  if (!(den > 0.0)) return 0.0;
  return std::clamp(num / den, 0.0, 1.0);
}

}  // namespace glottkit
