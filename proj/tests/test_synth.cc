// glottkit/tests/test_synth.cc

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
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <optional>
#include <vector>

#include "doctest.h"
#include "glottkit/audio.h"
#include "glottkit/error.h"
#include "glottkit/lpc.h"
#include "glottkit/pitch.h"
#include "glottkit/synth.h"
#include "oracles.h"
#include "wav_fixture.h"

using namespace glottkit;

namespace {

std::optional<ErrorKind> KindOf(const SynthConfig& cfg) {
  try {
    SynthVowel(OneMassParams{}, cfg);
  } catch (const Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

double MeanVoicedF0(const AudioBuffer& buf) {
  const F0Contour c = TrackF0(buf);
  double sum = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < c.f0.size(); ++i) {
    if (!c.voiced[i]) continue;
    sum += c.f0[i];
    ++n;
  }
  REQUIRE(n > 0);
  return sum / n;
}

double Rms(const std::vector<double>& x) {
  return std::sqrt(std::inner_product(x.begin(), x.end(), x.begin(), 0.0) /
                   static_cast<double>(x.size()));
}

}  // namespace

TEST_SUITE("synth") {

TEST_CASE("default vowel tracks 120 Hz") {
  const AudioBuffer buf = SynthVowel(OneMassParams{});
  CHECK(buf.sample_rate == 16000);
  CHECK(buf.samples.size() == 16000);
  CHECK(MeanVoicedF0(buf) == doctest::Approx(120.0).epsilon(2.0 / 120.0));
  const auto [lo, hi] = std::minmax_element(buf.samples.begin(), buf.samples.end());
  CHECK(std::max(-*lo, *hi) == doctest::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("formant peaks within 50 Hz of the configured tract") {
  const AudioBuffer buf = SynthVowel(OneMassParams{});
  const std::vector<double> frame(buf.samples.begin() + 4000, buf.samples.begin() + 8000);
  const auto freqs = PoleFrequencies(LpcAnalysis(frame, 18), buf.sample_rate, 400.0);
  for (const Formant& f : DefaultVowelTract()) {
    double best = 1e9;
    for (double p : freqs) best = std::min(best, std::abs(p - f.freq_hz));
    CAPTURE(f.freq_hz);
    CHECK(best < 50.0);
  }
}

TEST_CASE("modulated vowel follows the f0 modulation") {
  SynthConfig cfg;
  cfg.duration_sec = 2.0;
  cfg.modulation = Modulation{4.0, 10.0};
  const F0Contour c = TrackF0(SynthVowel(OneMassParams{}, cfg));
  double lo = 1e9;
  double hi = 0.0;
  for (std::size_t i = 0; i < c.f0.size(); ++i) {
    if (!c.voiced[i]) continue;
    lo = std::min(lo, c.f0[i]);
    hi = std::max(hi, c.f0[i]);
  }
  CHECK(lo < 113.0);
  CHECK(hi > 127.0);
  CHECK(hi - lo < 25.0);
}

TEST_CASE("noiseless output is bit-identical across seeds") {
  SynthConfig a;
  SynthConfig b;
  b.seed = 7;
  CHECK(SynthVowel(OneMassParams{}, a).samples == SynthVowel(OneMassParams{}, b).samples);
}

TEST_CASE("noise is seeded and scaled to the requested snr") {
  SynthConfig clean;
  SynthConfig noisy;
  noisy.snr_db = 20.0;
  const auto x = SynthVowel(OneMassParams{}, clean).samples;
  const auto y1 = SynthVowel(OneMassParams{}, noisy).samples;
  const auto y2 = SynthVowel(OneMassParams{}, noisy).samples;
  CHECK(y1 == y2);
  noisy.seed = 43;
  CHECK(SynthVowel(OneMassParams{}, noisy).samples != y1);

  // Peak normalization rescales the sum; the ratio of the clean part to the
  // residual is scale free.
  const double g = std::inner_product(x.begin(), x.end(), y1.begin(), 0.0) /
                   std::inner_product(x.begin(), x.end(), x.begin(), 0.0);
  std::vector<double> r(x.size());
  std::vector<double> s(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    s[i] = g * x[i];
    r[i] = y1[i] - s[i];
  }
  CHECK(20.0 * std::log10(Rms(s) / Rms(r)) == doctest::Approx(20.0).epsilon(0.05));
}

TEST_CASE("flow tracks the requested cycle rate") {
  SynthConfig cfg;
  cfg.f0_hz = 150.0;
  const auto flow = SynthFlow(OneMassParams{}, cfg);
  AudioBuffer b;
  b.samples = flow;
  b.sample_rate = cfg.sample_rate;
  for (double& v : b.samples) v -= std::accumulate(flow.begin(), flow.end(), 0.0) / flow.size();
  CHECK(MeanVoicedF0(b) == doctest::Approx(150.0).epsilon(0.02));
}

TEST_CASE("tract and argument errors") {
  SynthConfig cfg;
  cfg.tract = {{730.0, 0.0}};
  CHECK(KindOf(cfg) == ErrorKind::kUnstableTract);
  cfg.tract = {{730.0, -20.0}};
  CHECK(KindOf(cfg) == ErrorKind::kUnstableTract);
  cfg.tract = {{8000.0, 100.0}};
  CHECK(KindOf(cfg) == ErrorKind::kInvalidArgument);
  cfg.tract = DefaultVowelTract();
  cfg.duration_sec = 0.0;
  CHECK(KindOf(cfg) == ErrorKind::kInvalidArgument);
}

TEST_CASE("write_wav round trips and rejects clipping") {
  AudioBuffer buf = SynthVowel(OneMassParams{});
  const auto p16 = fixture::TempPath("synth16.wav");
  WriteWav(buf, p16, WavEncoding::kPcm16);
  const AudioBuffer r16 = ReadWav(p16);
  REQUIRE(r16.samples.size() == buf.samples.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < buf.samples.size(); ++i) {
    worst = std::max(worst, std::abs(r16.samples[i] - buf.samples[i]));
  }
  CHECK(worst <= 1.0 / 32768.0);

  const auto p32 = fixture::TempPath("synth32.wav");
  AudioBuffer f = buf;
  for (double& v : f.samples) v = static_cast<float>(v);
  WriteWav(f, p32, WavEncoding::kFloat32);
  CHECK(ReadWav(p32).samples == f.samples);

  buf.samples[100] = 1.5;
  try {
    WriteWav(buf, fixture::TempPath("clip.wav"));
    FAIL("expected ClippedSamples");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kClippedSamples);
  }
  CHECK_THROWS_AS(WriteWav(SynthVowel(OneMassParams{}),
                           std::filesystem::path("/nonexistent/dir/x.wav")),
                  Error);
}

}  // TEST_SUITE
