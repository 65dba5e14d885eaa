// glottkit/tests/test_abcde.cc

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
#include <random>

#include "doctest.h"
#include "glottkit/abcde.h"
#include "glottkit/error.h"
#include "oracles.h"
#include "vowel_fixtures.h"
#include "wav_fixture.h"

using namespace glottkit;

namespace {

// 20 stack windows from each vowel class.
std::vector<AbcdeExample> TinyFixture(const StackWindowConfig& w) {
  std::vector<AbcdeExample> out;
  for (int cls = 0; cls < 2; ++cls) {
    auto wins = AudioWindows(fixture::Vowel(cls, 0, 1.0, -1.0), w);
    REQUIRE(wins.size() >= 20);
    for (std::size_t i = 0; i < 20; ++i) out.push_back({wins[i], cls});
  }
  return out;
}

std::vector<double> Mean(const std::vector<LatentCode>& codes) {
  std::vector<double> m(codes.front().z.size(), 0.0);
  for (const auto& c : codes) {
    for (std::size_t j = 0; j < m.size(); ++j) m[j] += c.z[j] / static_cast<double>(codes.size());
  }
  return m;
}

AbcdeModel SmallSeeded(std::uint64_t seed) {
  AbcdeModel m = MakeAbcdeModel(6, {5, 4}, 3);
  InitializeWeights(m, seed, 0.5);
  m.head.weights = {0.3, -0.4, 0.2};
  m.head.bias = 0.1;
  m.input_mean = {0.1, -0.2, 0.0, 0.3, 0.05, -0.1};
  m.input_scale = 1.7;
  return m;
}

std::vector<AbcdeExample> SmallBatch(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<AbcdeExample> b;
  for (int i = 0; i < 6; ++i) {
    AbcdeExample e;
    for (int j = 0; j < 6; ++j) e.x.push_back(g(rng));
    e.label = i % 2;
    b.push_back(e);
  }
  return b;
}

}  // namespace

TEST_SUITE("abcde") {

TEST_CASE("zero nets map zero to zero") {
  const AbcdeModel m = MakeAbcdeModel(12, {8}, 4);
  const LatentCode z = Encode(m, std::vector<double>(12, 0.0));
  for (double v : z.z) CHECK(v == 0.0);
  const auto y = Decode(m, z);
  CHECK(y.size() == 12);
  for (double v : y) CHECK(v == 0.0);
  CHECK_THROWS_AS(Encode(m, std::vector<double>(5, 0.0)), Error);
  LatentCode wrong;
  wrong.z.assign(3, 0.0);
  CHECK_THROWS_AS(Decode(m, wrong), Error);
}

TEST_CASE("encode is deterministic and input-sensitive") {
  AbcdeModel m = MakeAbcdeModel(12, {8}, 4);
  InitializeWeights(m, 7);
  std::vector<double> x(12, 0.2), x2 = x;
  x2[5] += 1.0;
  const auto a = Encode(m, x), b = Encode(m, x), c = Encode(m, x2);
  CHECK(a.z == b.z);
  CHECK(oracle::RelativeDiff(c.z, a.z) > 0.0);
}

TEST_CASE("composite loss terms") {
  AbcdeModel m = SmallSeeded(3);
  const auto batch = SmallBatch(4);
  m.lambda_disc = 0.0;
  const CompositeLossValue v = CompositeLoss(m, batch);
  CHECK(v.total == v.recon);

  AbcdeModel zero = MakeAbcdeModel(6, {5}, 2);
  zero.head.bias = 40.0;
  const CompositeLossValue p = CompositeLoss(zero, {{std::vector<double>(6, 0.0), 1}});
  CHECK(p.total < 1e-6);

  m.lambda_disc = 1.0;
  auto shuffled = batch;
  std::reverse(shuffled.begin(), shuffled.end());
  std::rotate(shuffled.begin(), shuffled.begin() + 2, shuffled.end());
  CHECK(std::abs(CompositeLoss(m, shuffled).total - CompositeLoss(m, batch).total) < 1e-12);
}

TEST_CASE("manual backprop matches finite differences") {
  AbcdeModel m = SmallSeeded(11);
  const auto batch = SmallBatch(12);
  const auto grad = CompositeGradient(m, batch);
  const auto flat = FlatParameters(m);
  REQUIRE(grad.size() == flat.size());
  const double h = 1e-6;
  double worst = 0.0;
  std::vector<double> num(flat.size());
  for (std::size_t i = 0; i < flat.size(); ++i) {
    auto plus = flat, minus = flat;
    plus[i] += h;
    minus[i] -= h;
    AbcdeModel a = m, b = m;
    SetFlatParameters(a, plus);
    SetFlatParameters(b, minus);
    num[i] = (CompositeLoss(a, batch).total - CompositeLoss(b, batch).total) / (2 * h);
  }
  worst = oracle::RelativeDiff(grad, num);
  CHECK(worst < 1e-4);
  // Five seeded coordinates individually.
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::size_t> pick(0, flat.size() - 1);
  for (int k = 0; k < 5; ++k) {
    const std::size_t i = pick(rng);
    CHECK(std::abs(grad[i] - num[i]) <= 1e-4 * std::max(std::abs(num[i]), 1e-3));
  }
}

TEST_CASE("tiny fixture trains, reconstructs and separates") {
  StackWindowConfig w;
  const auto data = TinyFixture(w);
  AbcdeModel arch = MakeAbcdeModel(w.input_dim(), {256, 64}, 8);
  arch.windows = w;
  AbcdeTrainConfig cfg;
  const AbcdeTrainResult r = TrainAbcde(arch, data, cfg);
  REQUIRE(r.history.size() == 501);
  CHECK(r.history.back() < 0.5 * r.history.front());
  for (std::size_t i = 2; i < r.history.size(); ++i) CHECK(r.history[i] <= r.history[i - 1]);

  double worst = 0.0;
  for (const auto& e : data) {
    worst = std::max(worst, oracle::RelativeDiff(Decode(r.model, Encode(r.model, e.x)), e.x));
  }
  CHECK(worst < 0.1);

  const auto za = LatentFeatures(r.model, fixture::Vowel(0, 3));
  const auto zb = LatentFeatures(r.model, fixture::Vowel(1, 3));
  REQUIRE(!za.empty());
  CHECK(za.front().z.size() == 8);
  CHECK(oracle::RelativeDiff(Mean(za), Mean(zb)) * oracle::Norm(Mean(zb)) > 0.1);

  const AbcdeTrainResult again = TrainAbcde(arch, data, cfg);
  CHECK(again.history == r.history);
  CHECK(FlatParameters(again.model) == FlatParameters(r.model));
}

TEST_CASE("discriminative-only training separates the latent task") {
  StackWindowConfig w;
  const auto data = TinyFixture(w);
  AbcdeModel arch = MakeAbcdeModel(w.input_dim(), {32}, 4);
  arch.lambda_recon = 0.0;
  AbcdeTrainConfig cfg;
  cfg.epochs = 300;
  cfg.lr = 0.05;
  const AbcdeTrainResult r = TrainAbcde(arch, data, cfg);
  std::size_t ok = 0;
  for (const auto& e : data) ok += (Score(r.model.head, Encode(r.model, e.x).z) > 0.5) == (e.label == 1);
  CHECK(ok == data.size());

  auto single = data;
  for (auto& e : single) e.label = 1;
  try {
    TrainAbcde(arch, single, cfg);
    FAIL("single class accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kSingleClassData);
  }
}

TEST_CASE("latent features shape, determinism and short audio") {
  AbcdeModel m = MakeAbcdeModel(StackWindowConfig{}.input_dim(), {16}, 5);
  InitializeWeights(m, 2);
  const AudioBuffer b = fixture::Vowel(0, 1);
  const auto a = LatentFeatures(m, b), c = LatentFeatures(m, b);
  REQUIRE(a.size() >= 1);
  REQUIRE(a.size() == c.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].z == c[i].z);
    CHECK(a[i].window_index == i);
  }
  AudioBuffer shortclip;
  shortclip.samples.assign(600, 0.1);
  try {
    LatentFeatures(m, shortclip);
    FAIL("short clip accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kNoFrames);
  }
}

TEST_CASE("model json round trip keeps inference identical") {
  AbcdeModel m = SmallSeeded(21);
  m.lambda_recon = 0.7;
  const std::string text = AbcdeToJson(m);
  CHECK(text.find(kAbcdeVersion) != std::string::npos);
  const AbcdeModel back = AbcdeFromJson(text);
  for (const auto& e : SmallBatch(22)) {
    const auto z1 = Encode(m, e.x), z2 = Encode(back, e.x);
    CHECK(z1.z == z2.z);
    CHECK(Decode(m, z1) == Decode(back, z2));
    CHECK(Score(m.head, z1.z) == Score(back.head, z2.z));
  }
  CHECK(back.lambda_recon == 0.7);
  const auto path = fixture::TempPath("abcde.json");
  SaveAbcde(m, path);
  CHECK(AbcdeToJson(LoadAbcde(path)) == text);
  CHECK_THROWS_AS(AbcdeFromJson("{\"version\": \"other\"}"), Error);
}

}  // TEST_SUITE
