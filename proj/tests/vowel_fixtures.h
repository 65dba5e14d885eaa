// glottkit/tests/vowel_fixtures.h

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

// Two synthetic vowel classes shared by the classifier and autoencoder tests.

#ifndef GLOTTKIT_TESTS_VOWEL_FIXTURES_H_
#define GLOTTKIT_TESTS_VOWEL_FIXTURES_H_

#include <cstdint>
#include <random>
#include <vector>

#include "glottkit/synth.h"

namespace fixture {

inline std::vector<glottkit::Formant> VowelTract(int cls) {
  if (cls == 0) return glottkit::DefaultVowelTract();  // /aa/
  return {{270.0, 60.0}, {2290.0, 100.0}, {3010.0, 120.0}};  // /iy/
}

// One recording of class `cls`; f0 and noise vary with `index`. A negative
// `snr_db` leaves the recording noiseless.
inline glottkit::AudioBuffer Vowel(int cls, int index, double duration = 1.0,
                                   double snr_db = 30.0) {
  glottkit::SynthConfig cfg;
  cfg.duration_sec = duration;
  cfg.tract = VowelTract(cls);
  cfg.f0_hz = 105.0 + 7.0 * (index % 5);
  if (snr_db >= 0.0) cfg.snr_db = snr_db;
  cfg.seed = static_cast<std::uint64_t>(1000 * cls + index);
  return glottkit::SynthVowel(glottkit::OneMassParams{}, cfg);
}

struct Blobs {
  std::vector<std::vector<double>> x;
  std::vector<int> y;
};

// Two Gaussian clouds in the plane separated by a gap of `margin` along the
// first axis.
inline Blobs SeparableBlobs(std::size_t n, double margin, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Blobs b;
  while (b.x.size() < n) {
    const int cls = static_cast<int>(b.x.size() % 2);
    const double sign = cls == 1 ? 1.0 : -1.0;
    const double x0 = sign * (margin / 2.0 + 1.5) + 0.7 * g(rng);
    const double x1 = 3.0 * g(rng);
    if (sign * x0 < margin / 2.0) continue;
    b.x.push_back({x0, x1});
    b.y.push_back(cls);
  }
  return b;
}

}  // namespace fixture

#endif  // GLOTTKIT_TESTS_VOWEL_FIXTURES_H_
