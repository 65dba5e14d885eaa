// glottkit/tests/test_phase_features.cc

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
#include <fstream>
#include <numbers>
#include <regex>
#include <sstream>

#include "doctest.h"
#include "glottkit/error.h"
#include "glottkit/phase_features.h"
#include "oracles.h"
#include "wav_fixture.h"

using namespace glottkit;

namespace {

TrajectorySet Simulated(double a, double b, double d, std::size_t n = 20000, double dt = 0.01) {
  OneMassParams p;
  p.alpha = a;
  p.beta = b;
  p.delta = d;
  return SimulateOneMass(p, dt, n);
}

Portrait Circle(std::size_t n, std::size_t turns) {
  Portrait out;
  for (std::size_t i = 0; i <= n * turns; ++i) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
    out.push_back({-std::sin(t), -std::cos(t)});
  }
  return out;
}

Portrait Tail(const Portrait& p, double fraction) {
  const auto start = static_cast<std::size_t>(std::floor((1.0 - fraction) * static_cast<double>(p.size())));
  return Portrait(p.begin() + static_cast<long>(start), p.end());
}

std::size_t Count(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_SUITE("phase_features") {

TEST_CASE("portraits follow the recorded states") {
  const TrajectorySet t = Simulated(0.6, 0.32, 0.0, 1);
  const Portrait l = PhasePortrait(t, Fold::kLeft);
  REQUIRE(l.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(l[i].x == t.at(i, 0));
    CHECK(l[i].v == t.at(i, 1));
  }
  const TrajectorySet sym = Simulated(0.6, 0.32, 0.0, 3000);
  const Portrait a = PhasePortrait(sym, Fold::kLeft), b = PhasePortrait(sym, Fold::kRight);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].x == b[i].x);
    CHECK(a[i].v == b[i].v);
  }

  const RhsFn harmonic = [](std::span<const double> s, std::span<double> d) {
    d[0] = s[1];
    d[1] = -s[0];
  };
  const std::array<double, 2> x0 = {1.0, 0.0};
  TrajectorySet h = IntegrateRk4(harmonic, x0, 0.01, 1000);
  RowMatrix four(h.states.rows(), 4);
  four << h.states, h.states;
  h.states = four;
  for (const auto& pt : PhasePortrait(h, Fold::kLeft)) CHECK(std::abs(std::hypot(pt.x, pt.v) - 1.0) < 1e-5);
}

TEST_CASE("limit cycle area of a circle and of a decay") {
  const Portrait c = Circle(2000, 3);
  CHECK(LimitCycleArea(c, 1.0) == doctest::Approx(std::numbers::pi).epsilon(0.01));

  const auto cycles = DetectCycles(c);
  REQUIRE(!cycles.empty());
  Portrait loop = cycles.back();
  loop.pop_back();
  Portrait rotated(loop.begin() + 37, loop.end());
  rotated.insert(rotated.end(), loop.begin(), loop.begin() + 37);
  CHECK(std::abs(PolygonArea(rotated) - PolygonArea(loop)) < 1e-9);

  const Portrait decay = PhasePortrait(Simulated(0.0, 2.0, 0.0), Fold::kLeft);
  bool small_or_none = false;
  try {
    small_or_none = LimitCycleArea(decay) < 0.01;
  } catch (const Error& e) {
    small_or_none = e.kind() == ErrorKind::kNoCycleDetected;
  }
  CHECK(small_or_none);
}

TEST_CASE("limit cycle area survives time resampling") {
  const TrajectorySet fine = Simulated(0.6, 0.32, 0.0, 40000, 0.005);
  const TrajectorySet coarse = Simulated(0.6, 0.32, 0.0, 20000, 0.01);
  const double a = LimitCycleArea(PhasePortrait(fine, Fold::kLeft));
  const double b = LimitCycleArea(PhasePortrait(coarse, Fold::kLeft));
  CHECK(std::abs(a - b) / b < 0.01);
}

TEST_CASE("asymmetry index") {
  CHECK(AsymmetryIndex(Simulated(0.6, 0.32, 0.0)) <= 1e-9);
  double prev = -1.0;
  for (int i = 0; i <= 5; ++i) {
    const double a = AsymmetryIndex(Simulated(0.6, 0.32, 0.1 * i));
    CHECK(a > prev);
    prev = a;
  }
  TrajectorySet zero;
  zero.dt = 0.01;
  zero.states = RowMatrix::Zero(50, 4);
  zero.times.resize(50);
  CHECK(AsymmetryIndex(zero) == 0.0);

  TrajectorySet t = Simulated(0.6, 0.32, 0.4);
  const double before = AsymmetryIndex(t);
  RowMatrix swapped(t.states.rows(), 4);
  swapped << t.states.col(2), t.states.col(3), t.states.col(0), t.states.col(1);
  t.states = swapped;
  CHECK(AsymmetryIndex(t) == doctest::Approx(before).epsilon(1e-12));
}

TEST_CASE("cycle variability") {
  const Portrait sustained = PhasePortrait(Simulated(0.6, 0.32, 0.0), Fold::kLeft);
  const double closed = CycleVariability(Tail(sustained, 0.3));
  CHECK(closed < 0.01);
  const double rough = CycleVariability(Tail(PhasePortrait(Simulated(0.6, 0.32, 0.9), Fold::kLeft), 0.3));
  CHECK(rough > closed);

  CHECK(CycleVariability(Circle(500, 4)) < 1e-12);
  CHECK_THROWS_AS(CycleVariability(Circle(500, 1)), Error);
}

TEST_CASE("line and circle Hausdorff distances") {
  const Portrait a = {{0, 0}, {1, 0}};
  const Portrait b = {{0, 1}, {1, 1}};
  CHECK(HausdorffDistance(a, b) == doctest::Approx(1.0));
  CHECK(HausdorffDistance(a, a) == 0.0);
}

TEST_CASE("features stay finite inside the stable box") {
  for (const auto& d : oracle::StableDraws(8, 31, 0.05, 1.0, 0.05, 1.0, -1.0, 1.0)) {
    const TrajectorySet t = Simulated(d.alpha, d.beta, d.delta, 10000);
    CHECK(std::isfinite(AsymmetryIndex(t)));
    const Portrait l = PhasePortrait(t, Fold::kLeft);
    bool finite_or_none = false;
    try {
      finite_or_none = std::isfinite(LimitCycleArea(l)) && std::isfinite(CycleVariability(l));
    } catch (const Error& e) {
      finite_or_none = e.kind() == ErrorKind::kNoCycleDetected;
    }
    CHECK(finite_or_none);
  }
}

TEST_CASE("svg structure and determinism") {
  const Portrait three = {{0, 0}, {0.5, 0.2}, {1, -0.3}};
  const std::string one = SvgDocument({{"normal", three}});
  CHECK(Count(one, "<polyline") == 1);
  const std::regex points("points=\"([^\"]*)\"");
  std::smatch m;
  REQUIRE(std::regex_search(one, m, points));
  std::istringstream is(m[1].str());
  std::string pair;
  std::size_t pairs = 0;
  while (is >> pair) pairs += pair.find(',') != std::string::npos;
  CHECK(pairs == 3);

  const std::string two = SvgDocument({{"left", three}, {"right", three}});
  CHECK(Count(two, "<polyline") == 2);
  CHECK(Count(two, "id=\"stroke-0\"") == 1);
  CHECK(Count(two, "id=\"stroke-1\"") == 1);

  const auto path = fixture::TempPath("portrait.svg");
  RenderSvg({{"normal", three}}, path);
  std::ifstream f(path);
  std::stringstream buf;
  buf << f.rdbuf();
  CHECK(buf.str() == one);
  CHECK(SvgDocument({{"normal", three}}) == one);
  CHECK_THROWS_AS(RenderSvg({}, path), Error);
  CHECK_THROWS_AS(RenderSvg({{"x", three}}, "/nonexistent_dir/x.svg"), Error);
}

}  // TEST_SUITE
