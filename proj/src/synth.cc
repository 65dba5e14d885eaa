// glottkit/synth.cc

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

#include "glottkit/synth.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <random>

#include "glottkit/error.h"
#include "glottkit/lpc.h"

namespace glottkit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

LpcModel TractModel(const std::vector<Formant>& tract, double fs) {
  std::vector<double> poly = {1.0};  // 1 - sum a_k z^-k, stored as 1, -a_1, ...
  for (const Formant& f : tract) {
    if (!(f.freq_hz > 0.0) || f.freq_hz >= 0.5 * fs) {
      throw Error(ErrorKind::kInvalidArgument, "formant must lie in (0, Nyquist)");
    }
    const double r = std::exp(-std::numbers::pi * f.bandwidth_hz / fs);
    if (!(r < 1.0)) {
      throw Error(ErrorKind::kUnstableTract, "resonator pole radius >= 1");
    }
    const double w = kTwoPi * f.freq_hz / fs;
    const double sec[3] = {1.0, -2.0 * r * std::cos(w), r * r};
    std::vector<double> next(poly.size() + 2, 0.0);
    for (std::size_t i = 0; i < poly.size(); ++i) {
      for (int j = 0; j < 3; ++j) next[i + j] += poly[i] * sec[j];
    }
    poly = std::move(next);
  }
  LpcModel m;
  for (std::size_t k = 1; k < poly.size(); ++k) m.coeffs.push_back(-poly[k]);
  m.gain = 1.0;
  return m;
}

}  // namespace

std::vector<Formant> DefaultVowelTract() {
  return {{730.0, 60.0}, {1090.0, 110.0}, {2440.0, 140.0}};
}

std::vector<double> SynthFlow(const OneMassParams& p, const SynthConfig& cfg) {
  if (!(cfg.duration_sec > 0.0) || !(cfg.f0_hz > 0.0) || cfg.sample_rate <= 0) {
    throw Error(ErrorKind::kInvalidArgument, "duration, f0 and rate must be > 0");
  }
  const double fs = cfg.sample_rate;
  const auto total = static_cast<std::size_t>(
      std::llround((cfg.duration_sec + cfg.lead_in_sec) * fs));
  std::vector<double> theta(total);
  for (std::size_t n = 0; n < total; ++n) {
    const double t = static_cast<double>(n) / fs;
    double phase = cfg.f0_hz * t;
    if (cfg.modulation && cfg.modulation->rate_hz > 0.0) {
      const double w = kTwoPi * cfg.modulation->rate_hz;
      phase += cfg.modulation->depth_hz * (1.0 - std::cos(w * t)) / w;
    }
    theta[n] = kTwoPi * phase;
  }

  const double theta_end = theta.empty() ? 0.0 : theta.back();
  const std::size_t from = static_cast<std::size_t>(cfg.warmup / cfg.model_dt);
  // Period probe, then the full run with the measured cycle length.
  const auto probe = SimulateOneMass(
      p, cfg.model_dt, from + static_cast<std::size_t>(12.0 * kTwoPi / cfg.model_dt));
  double period = MeanCyclePeriod(probe, 0, from, 8);
  if (!(period > 0.0)) period = kTwoPi;
  const double rate = period / kTwoPi;
  const double horizon = cfg.warmup + rate * theta_end + 2.0 * period;
  const auto traj = SimulateOneMass(
      p, cfg.model_dt, static_cast<std::size_t>(std::ceil(horizon / cfg.model_dt)) + 2);
  std::vector<double> taus(total);
  for (std::size_t n = 0; n < total; ++n) taus[n] = cfg.warmup + rate * theta[n];
  return SampleModelFlow(traj, p.rest_gap, taus).u;
}

AudioBuffer SynthVowel(const OneMassParams& p, const SynthConfig& cfg) {
  const double fs = cfg.sample_rate;
  const LpcModel tract = TractModel(cfg.tract, fs);
  const auto flow = SynthFlow(p, cfg);
  const auto filtered = AllPoleFilter(flow, tract);
  const auto lead = std::min<std::size_t>(
      static_cast<std::size_t>(std::llround(cfg.lead_in_sec * fs)), filtered.size());

  AudioBuffer out;
  out.sample_rate = cfg.sample_rate;
  out.samples.reserve(filtered.size() - lead);
  for (std::size_t n = lead; n < filtered.size(); ++n) {
    out.samples.push_back(filtered[n] - (n > 0 ? filtered[n - 1] : 0.0));
  }

  auto normalize = [&](std::vector<double>& x) {
    double peak = 0.0;
    for (double v : x) peak = std::max(peak, std::abs(v));
    if (peak > 0.0) {
      for (double& v : x) v *= cfg.peak / peak;
    }
  };
  normalize(out.samples);
  if (cfg.snr_db) {
    double power = 0.0;
    for (double v : out.samples) power += v * v;
    power /= static_cast<double>(std::max<std::size_t>(out.size(), 1));
    const double sigma = std::sqrt(power / std::pow(10.0, *cfg.snr_db / 10.0));
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> nd(0.0, sigma);
    for (double& v : out.samples) v += nd(rng);
    normalize(out.samples);
  }
  return out;
}

namespace {

void PutU32(std::ofstream& f, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                     static_cast<char>((v >> 16) & 0xff),
                     static_cast<char>((v >> 24) & 0xff)};
  f.write(b, 4);
}

void PutU16(std::ofstream& f, std::uint16_t v) {
  const char b[2] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff)};
  f.write(b, 2);
}

}  // namespace

void WriteWav(const AudioBuffer& buf, const std::filesystem::path& path,
              WavEncoding encoding) {
  for (double v : buf.samples) {
    if (!(v >= -1.0 && v <= 1.0)) {
      throw Error(ErrorKind::kClippedSamples, "sample outside [-1, 1]");
    }
  }
  const bool pcm = encoding == WavEncoding::kPcm16;
  const std::uint16_t bits = pcm ? 16 : 32;
  const std::uint16_t block = bits / 8;
  const auto data_bytes = static_cast<std::uint32_t>(buf.size() * block);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorKind::kIoError, "cannot open " + path.string());
  f.write("RIFF", 4);
  PutU32(f, 36 + data_bytes);
  f.write("WAVE", 4);
  f.write("fmt ", 4);
  PutU32(f, 16);
  PutU16(f, pcm ? 1 : 3);
  PutU16(f, 1);
  PutU32(f, static_cast<std::uint32_t>(buf.sample_rate));
  PutU32(f, static_cast<std::uint32_t>(buf.sample_rate) * block);
  PutU16(f, block);
  PutU16(f, bits);
  f.write("data", 4);
  PutU32(f, data_bytes);
  for (double v : buf.samples) {
    if (pcm) {
      const double q = std::clamp(std::round(v * 32768.0), -32768.0, 32767.0);
      PutU16(f, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
    } else {
      const float x = static_cast<float>(v);
      std::uint32_t u;
      std::memcpy(&u, &x, 4);
      PutU32(f, u);
    }
  }
  if (!f) throw Error(ErrorKind::kIoError, "write failed for " + path.string());
}

}  // namespace glottkit
