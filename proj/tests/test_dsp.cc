// glottkit/tests/test_dsp.cc

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

#include <cmath>
#include <complex>
#include <numbers>

#include "doctest.h"
#include "glottkit/error.h"
#include "glottkit/lpc.h"
#include "glottkit/pitch.h"
#include "glottkit/spectral.h"
#include "glottkit/synth.h"
#include "oracles.h"

using namespace glottkit;

namespace {

AudioBuffer Buffer(std::vector<double> x, int rate = 16000) {
  AudioBuffer b;
  b.samples = std::move(x);
  b.sample_rate = rate;
  return b;
}

std::vector<double> OracleHann(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = std::pow(std::sin(std::numbers::pi * static_cast<double>(i) / static_cast<double>(n - 1)), 2);
  }
  return w;
}

}  // namespace

TEST_SUITE("dsp") {

TEST_CASE("autocorrelation sums and bounds") {
  const std::vector<double> x = {1, 1, 1, 1};
  CHECK(Autocorrelation(x, 2) == std::vector<double>{4, 3, 2});
  CHECK_THROWS_AS(Autocorrelation(x, 4), Error);
  const auto noise = oracle::GaussianNoise(4096, 11);
  const auto r = Autocorrelation(noise, 16);
  for (double v : r) CHECK(std::abs(v) <= r[0]);
  CHECK(std::abs(r[1] / r[0]) < 0.1);
}

TEST_CASE("levinson on white and AR(1) data") {
  const LpcModel white = LevinsonDurbin(std::vector<double>{1, 0, 0, 0}, 3);
  for (double a : white.coeffs) CHECK(a == 0.0);
  CHECK(white.gain == doctest::Approx(1.0));

  const auto x = oracle::ArProcess({0.9}, oracle::GaussianNoise(100000, 3));
  const LpcModel m = LevinsonDurbin(Autocorrelation(x, 1), 1);
  CHECK(m.coeffs[0] == doctest::Approx(0.9).epsilon(0.02 / 0.9));
  CHECK_THROWS_AS(LevinsonDurbin(std::vector<double>{0, 0}, 1), Error);
}

TEST_CASE("AR(2) poles recovered within 0.02") {
  const std::complex<double> pole = std::polar(0.95, 0.3 * std::numbers::pi);
  const double a1 = 2.0 * pole.real(), a2 = -std::norm(pole);
  const auto x = oracle::ArProcess({a1, a2}, oracle::GaussianNoise(100000, 5));
  const LpcModel m = LevinsonDurbin(Autocorrelation(x, 2), 2);
  const auto [r1, r2] = oracle::QuadraticRoots(m.coeffs[0], m.coeffs[1]);
  const std::complex<double> upper = r1.imag() > 0 ? r1 : r2;
  CHECK(std::abs(upper - pole) < 0.02);
  for (double k : m.reflection) CHECK(std::abs(k) < 1.0);
  const auto poles = LpcPoles(m);
  REQUIRE(poles.size() == 2);
  for (const auto& p : poles) CHECK(std::min(std::abs(p - pole), std::abs(p - std::conj(pole))) < 0.02);
}

TEST_CASE("inverse filter recovers a known excitation") {
  LpcModel m;
  m.coeffs = {0.5, -0.3, 0.2, -0.1, 0.05, 0.02, -0.02, 0.01, 0.005, -0.002};
  const auto e = oracle::GaussianNoise(4000, 9);
  const auto x = oracle::ArProcess(m.coeffs, e);
  const auto rec = InverseFilter(x, m);
  std::vector<double> a(e.begin() + 10, e.end()), b(rec.begin() + 10, rec.end());
  CHECK(oracle::RelativeDiff(b, a) < 1e-6);
  const auto y = AllPoleFilter(e, m);
  CHECK(oracle::RelativeDiff(y, x) < 1e-12);

  LpcModel zero;
  CHECK(InverseFilter(e, zero) == e);
  CHECK(InverseFilter(std::vector<double>(50, 0.0), m) == std::vector<double>(50, 0.0));
}

TEST_CASE("spectrogram bins, zeros and Parseval") {
  const auto tone = Buffer(oracle::Sine(1000.0, 16000.0, 8000));
  const RowMatrix s = Spectrogram(tone, 400, 160, 512);
  CHECK(s.cols() == 257);
  for (Eigen::Index t = 0; t < s.rows(); ++t) {
    Eigen::Index arg = 0;
    s.row(t).maxCoeff(&arg);
    CHECK(arg == 32);
  }
  CHECK(Spectrogram(Buffer(std::vector<double>(4000, 0.0)), 256, 80, 512).isZero());
  CHECK_THROWS_AS(Spectrogram(tone, 256, 300, 512), Error);
  CHECK_THROWS_AS(Spectrogram(tone, 256, 80, 128), Error);

  const auto noise = Buffer(oracle::GaussianNoise(4000, 21, 0.2));
  const std::size_t win = 256, hop = 80, nfft = 512;
  const RowMatrix m = Spectrogram(noise, win, hop, nfft);
  const auto w = OracleHann(win);
  double worst = 0.0;
  for (Eigen::Index t = 0; t < m.rows(); ++t) {
    double time_energy = 0.0;
    for (std::size_t i = 0; i < win; ++i) {
      const double v = noise.samples[static_cast<std::size_t>(t) * hop + i] * w[i];
      time_energy += v * v;
    }
    double freq = 0.0;
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      const double mag2 = m(t, k) * m(t, k);
      freq += (k == 0 || k == m.cols() - 1) ? mag2 : 2.0 * mag2;
    }
    freq /= static_cast<double>(nfft);
    worst = std::max(worst, std::abs(freq - time_energy) / time_energy);
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("stack layers align") {
  const auto b = Buffer(oracle::GaussianNoise(16000, 4, 0.1));
  const auto stack = BuildStack(b, DefaultStackResolutions());
  REQUIRE(stack.layers.size() == 3);
  for (const auto& l : stack.layers) {
    CHECK(l.rows() == stack.layers[0].rows());
    CHECK(l.cols() == 257);
    CHECK(l.minCoeff() >= 0.0);
  }
  const auto single = BuildStack(b, {{256, 80, 512}});
  const RowMatrix direct = Spectrogram(b, 256, 80, 512);
  CHECK(single.layers[0] == direct.topRows(single.layers[0].rows()));
}

TEST_CASE("f0 of sine, pulse train and noise") {
  const auto sine = oracle::Sine(220.0, 16000.0, 800);
  const auto f = EstimateF0(sine, 16000.0, 60.0, 400.0);
  REQUIRE(f.has_value());
  CHECK(std::abs(*f - 220.0) < 1.0);

  std::vector<double> pulses(1600, 0.0);
  const double period = 16000.0 / 110.0;
  for (double t = 0.0; t < 1600.0; t += period) pulses[static_cast<std::size_t>(t)] = 1.0;
  const auto fp = EstimateF0(pulses, 16000.0, 60.0, 400.0);
  REQUIRE(fp.has_value());
  CHECK(std::abs(*fp - 110.0) < 1.0);

  CHECK_FALSE(EstimateF0(oracle::GaussianNoise(800, 8), 16000.0, 60.0, 400.0).has_value());

  std::vector<double> scaled(sine);
  for (double& v : scaled) v *= 0.01;
  CHECK(*EstimateF0(scaled, 16000.0, 60.0, 400.0) == doctest::Approx(*f).epsilon(1e-12));
}

TEST_CASE("tremor index bands") {
  SynthConfig cfg;
  cfg.duration_sec = 2.0;
  CHECK(TremorIndex(SynthVowel(OneMassParams{}, cfg)) == 0.0);
  cfg.modulation = Modulation{3.0, 5.0};
  const double slow = TremorIndex(SynthVowel(OneMassParams{}, cfg));
  cfg.modulation = Modulation{8.0, 5.0};
  const double fast = TremorIndex(SynthVowel(OneMassParams{}, cfg));
  CHECK(slow >= 0.8);
  CHECK(fast <= 0.3);
  CHECK(slow <= 1.0);
  CHECK(fast >= 0.0);
  CHECK_THROWS_AS(TremorIndex(Buffer(oracle::GaussianNoise(32000, 2, 0.1))), Error);
}

TEST_CASE("cepstra of silence and of a scaled frame") {
  const auto zero = CepstralFeatures(std::vector<double>(400, 0.0), 16000.0, 26, 13);
  REQUIRE(zero.size() == 13);
  CHECK(zero[0] != 0.0);
  for (std::size_t k = 1; k < zero.size(); ++k) CHECK(std::abs(zero[k]) < 1e-9);

  const auto x = oracle::GaussianNoise(400, 17, 0.1);
  std::vector<double> x2(x);
  for (double& v : x2) v *= 2.0;
  const auto a = CepstralFeatures(x, 16000.0, 26, 13);
  const auto b = CepstralFeatures(x2, 16000.0, 26, 13);
  for (std::size_t k = 1; k < a.size(); ++k) CHECK(std::abs(a[k] - b[k]) < 1e-9);
  CHECK(std::abs(b[0] - a[0]) > 1e-3);

  const auto lo = CepstralFeatures(oracle::Sine(1000.0, 16000.0, 400), 16000.0, 26, 13);
  const auto hi = CepstralFeatures(oracle::Sine(3000.0, 16000.0, 400), 16000.0, 26, 13);
  CHECK(oracle::RelativeDiff(lo, hi) > 0.0);
}

TEST_CASE("iaif recovers the synthetic flow") {
  SynthConfig cfg;
  cfg.duration_sec = 0.3;
  const OneMassParams p{};
  const AudioBuffer speech = SynthVowel(p, cfg);
  const auto flow = SynthFlow(p, cfg);
  const auto lead = static_cast<std::size_t>(std::llround(cfg.lead_in_sec * cfg.sample_rate));
  const std::size_t start = 1600, len = 1600;
  const GlottalFlowSignal g =
      Iaif(std::span<const double>(speech.samples).subspan(start, len), 16000.0);
  CHECK(g.normalized);
  double peak = 0.0;
  for (double v : g.flow) peak = std::max(peak, std::abs(v));
  CHECK(peak == doctest::Approx(1.0));
  for (std::size_t n = 1; n < g.size(); ++n) {
    CHECK(g.flow_deriv[n] == doctest::Approx((g.flow[n] - g.flow[n - 1]) * 16000.0));
  }
  // The integrator's start-up transient is skipped.
  const std::size_t skip = 400;
  std::vector<double> est(g.flow.begin() + skip, g.flow.end());
  std::vector<double> truth(flow.begin() + static_cast<long>(lead + start + skip),
                            flow.begin() + static_cast<long>(lead + start + len));
  CHECK(oracle::Pearson(est, truth) >= 0.9);

  CHECK_THROWS_AS(Iaif(std::vector<double>(100, 0.1), 16000.0), Error);
  try {
    Iaif(std::vector<double>(1600, 0.0), 16000.0);
    FAIL("silence accepted");
  } catch (const Error& e) {
    CHECK((e.kind() == ErrorKind::kNonNormalizable || e.kind() == ErrorKind::kFrameTooShort));
  }
}

}  // TEST_SUITE
