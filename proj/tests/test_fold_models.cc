// glottkit/tests/test_fold_models.cc

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
#include <numbers>

#include "doctest.h"
#include "glottkit/error.h"
#include "glottkit/fold_models.h"
#include "glottkit/phase_features.h"
#include "oracles.h"

using namespace glottkit;

namespace {

const RhsFn kHarmonic = [](std::span<const double> s, std::span<double> d) {
  d[0] = s[1];
  d[1] = -s[0];
};

double MaxErrorHarmonic(double dt) {
  const auto n = static_cast<std::size_t>(std::llround(2.0 * std::numbers::pi / dt));
  const std::array<double, 2> x0 = {1.0, 0.0};
  const TrajectorySet t = IntegrateRk4(kHarmonic, x0, dt, n);
  double worst = 0.0;
  for (std::size_t i = 0; i < t.num_states(); ++i) {
    worst = std::max(worst, std::abs(t.at(i, 0) - std::cos(dt * static_cast<double>(i))));
  }
  return worst;
}

}  // namespace

TEST_SUITE("fold_models") {

TEST_CASE("one-mass rhs reductions") {
  OneMassParams p;
  const std::array<double, 4> zero{};
  for (double d : OneMassRhs(zero, p)) CHECK(d == 0.0);

  const std::array<double, 4> mirrored = {0.3, -0.2, 0.3, -0.2};
  const auto d = OneMassRhs(mirrored, p);
  CHECK(d[1] == d[3]);

  p.alpha = 0.0;
  p.beta = 0.0;
  const std::array<double, 4> s = {0.3, -0.2, -0.1, 0.5};
  const auto h = OneMassRhs(s, p);
  CHECK(h[0] == s[1]);
  CHECK(h[1] == -s[0]);
  CHECK(h[2] == s[3]);
  CHECK(h[3] == -s[2]);
}

TEST_CASE("one-mass rhs formula") {
  OneMassParams p;
  p.alpha = 0.7;
  p.beta = 0.4;
  p.delta = 0.3;
  const std::array<double, 4> s = {0.2, 0.1, -0.3, 0.4};
  const auto d = OneMassRhs(s, p);
  const double coupling = 0.7 * (0.1 + 0.4);
  CHECK(d[1] == doctest::Approx(coupling - 0.4 * (1 + 0.04) * 0.1 - (1 - 0.15) * 0.2));
  CHECK(d[3] == doctest::Approx(coupling - 0.4 * (1 + 0.09) * 0.4 - (1 + 0.15) * -0.3));
}

TEST_CASE("one-mass jacobians match differences") {
  OneMassParams p;
  p.delta = 0.2;
  const std::array<double, 4> s = {0.2, 0.1, -0.3, 0.4};
  std::array<double, 16> js;
  std::array<double, 12> jp;
  OneMassJacobians(s, p, js, jp);
  const double h = 1e-6;
  for (int j = 0; j < 4; ++j) {
    auto a = s, b = s;
    a[j] += h;
    b[j] -= h;
    const auto fa = OneMassRhs(a, p), fb = OneMassRhs(b, p);
    for (int i = 0; i < 4; ++i) CHECK(js[i * 4 + j] == doctest::Approx((fa[i] - fb[i]) / (2 * h)).epsilon(1e-6));
  }
  for (int j = 0; j < 3; ++j) {
    OneMassParams a = p, b = p;
    double* pa = j == 0 ? &a.alpha : j == 1 ? &a.beta : &a.delta;
    double* pb = j == 0 ? &b.alpha : j == 1 ? &b.beta : &b.delta;
    *pa += h;
    *pb -= h;
    const auto fa = OneMassRhs(s, a), fb = OneMassRhs(s, b);
    for (int i = 0; i < 4; ++i) CHECK(jp[i * 3 + j] == doctest::Approx((fa[i] - fb[i]) / (2 * h)).epsilon(1e-6));
  }
}

TEST_CASE("rk4 analytic period and order") {
  const std::array<double, 2> x0 = {1.0, 0.0};
  const TrajectorySet t = IntegrateRk4(kHarmonic, x0, 0.01, 628);
  const double exact_end = std::cos(6.28);
  CHECK(std::abs(t.at(628, 0) - exact_end) < 1e-6);
  // 628 steps of 0.01 end at 6.28; one step over the remainder lands on 2 pi.
  const double rest = 2.0 * std::numbers::pi - 6.28;
  const TrajectorySet tail = IntegrateRk4(kHarmonic, t.state(628), rest, 1);
  CHECK(std::abs(tail.at(1, 0) - 1.0) < 1e-6);

  const double ratio = MaxErrorHarmonic(0.1) / MaxErrorHarmonic(0.05);
  CHECK(ratio >= 12.0);
  CHECK(ratio <= 20.0);
  CHECK(IntegrateRk4(kHarmonic, x0, 0.01, 1).num_states() == 2);
}

TEST_CASE("rk4 reports overflow with the finite prefix") {
  const RhsFn blow = [](std::span<const double> s, std::span<double> d) { d[0] = s[0] * s[0]; };
  const std::array<double, 1> x0 = {1.0};
  try {
    IntegrateRk4(blow, x0, 0.1, 1000);
    FAIL("no overflow");
  } catch (const NumericalOverflow& e) {
    CHECK(e.kind() == ErrorKind::kNumericalOverflow);
    CHECK(e.partial().num_states() >= 1);
    for (std::size_t i = 0; i < e.partial().num_states(); ++i) CHECK(std::isfinite(e.partial().at(i, 0)));
  }
}

TEST_CASE("stable box never overflows") {
  for (const auto& d : oracle::StableDraws(12, 99, 0.0, 1.0, 0.01, 1.0, -1.0, 1.0)) {
    OneMassParams p;
    p.alpha = d.alpha;
    p.beta = d.beta;
    p.delta = d.delta;
    p.x0_l = 0.5;
    p.x0_r = -0.5;
    CHECK_NOTHROW(SimulateOneMass(p, 0.01, 5000));
  }
}

TEST_CASE("symmetric one-mass keeps folds identical") {
  OneMassParams p;
  const TrajectorySet t = SimulateOneMass(p, 0.01, 5000);
  double worst = 0.0;
  for (std::size_t i = 0; i < t.num_states(); ++i) {
    worst = std::max(worst, std::abs(t.at(i, 0) - t.at(i, 2)));
    worst = std::max(worst, std::abs(t.at(i, 1) - t.at(i, 3)));
  }
  CHECK(worst <= 1e-12);
  CHECK(AsymmetryIndex(t) <= 1e-9);
}

TEST_CASE("two-mass symmetry, rest and energy") {
  TwoMassParams p;
  const std::array<double, 8> zero{};
  TwoMassParams quiet = p;
  quiet.ps = 0.0;
  for (double d : TwoMassRhs(zero, quiet)) CHECK(d == 0.0);

  const std::array<double, 8> mirrored = {0.01, 0.002, 0.005, -0.001, 0.01, 0.002, 0.005, -0.001};
  const auto d = TwoMassRhs(mirrored, p);
  for (int i = 0; i < 4; ++i) CHECK(d[i] == d[i + 4]);

  const TrajectorySet t = SimulateTwoMass(p, 0.01, 20000);
  double worst = 0.0;
  for (std::size_t i = 0; i < t.num_states(); ++i) {
    for (int j = 0; j < 4; ++j) worst = std::max(worst, std::abs(t.at(i, j) - t.at(i, j + 4)));
  }
  CHECK(worst <= 1e-12);

  quiet.x0 = {0.002, 0.0, 0.001, 0.0, 0.002, 0.0, 0.001, 0.0};
  const TrajectorySet e = SimulateTwoMass(quiet, 0.01, 20000);
  double prev = TwoMassEnergy(e.state(0), quiet);
  bool monotone = true;
  for (std::size_t i = 1; i < e.num_states(); ++i) {
    const double now = TwoMassEnergy(e.state(i), quiet);
    monotone = monotone && now <= prev * (1.0 + 1e-12);
    prev = now;
  }
  CHECK(monotone);
  CHECK(prev < TwoMassEnergy(e.state(0), quiet));

  TwoMassParams bad = p;
  bad.q = 2.5;
  CHECK_THROWS_AS(bad.Validate(), Error);
  CHECK_THROWS_AS(SimulateTwoMass(p, 0.02, 10), Error);
}

TEST_CASE("model flow formula and degenerate case") {
  TrajectorySet rest;
  rest.dt = 0.01;
  rest.states = RowMatrix::Zero(100, 4);
  rest.times.resize(100);
  OneMassParams p;
  const GlottalFlowSignal g = ModelFlow(rest, p);
  for (double u : g.flow) CHECK(u == 1.0);

  TrajectorySet closed = rest;
  closed.states.col(0).setConstant(-1.0);
  closed.states.col(2).setConstant(-1.0);
  CHECK_THROWS_AS(ModelFlow(closed, p), Error);
}

TEST_CASE("sustained flow period matches the portrait cycle") {
  OneMassParams p;
  const double dt = 0.01;
  const TrajectorySet t = SimulateOneMass(p, dt, 20000);
  const GlottalFlowSignal g = ModelFlow(t, p);
  // Autocorrelation peak of the de-meaned flow over the second half.
  std::vector<double> u(g.flow.begin() + 10000, g.flow.end());
  double mean = 0;
  for (double v : u) mean += v;
  mean /= static_cast<double>(u.size());
  for (double& v : u) v -= mean;
  std::size_t best = 0;
  double best_r = -1e300;
  for (std::size_t lag = 300; lag < 1200; ++lag) {
    double r = 0;
    for (std::size_t i = 0; i + lag < u.size(); ++i) r += u[i] * u[i + lag];
    r /= static_cast<double>(u.size() - lag);
    if (r > best_r) {
      best_r = r;
      best = lag;
    }
  }
  const double flow_period = static_cast<double>(best) * dt;
  // Portrait cycle: spacing of upward zero crossings of x_l.
  std::vector<double> crossings;
  for (std::size_t i = 10001; i < t.num_states(); ++i) {
    const double a = t.at(i - 1, 0), b = t.at(i, 0);
    if (a < 0.0 && b >= 0.0) crossings.push_back((static_cast<double>(i - 1) + a / (a - b)) * dt);
  }
  REQUIRE(crossings.size() >= 3);
  const double cycle = (crossings.back() - crossings.front()) / static_cast<double>(crossings.size() - 1);
  CHECK(std::abs(flow_period - cycle) / cycle < 0.02);
  CHECK(MeanCyclePeriod(t, 0, 10000, 5) == doctest::Approx(cycle).epsilon(0.01));
}

}  // TEST_SUITE
