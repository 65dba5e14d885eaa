// glottkit/fold_models.cc

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

#include "glottkit/fold_models.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace glottkit {

namespace {

bool AllFinite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

void OneMassParams::Validate() const {
  const std::array<double, 8> all = {alpha, beta, delta, x0_l,
                                     v0_l,  x0_r, v0_r,  rest_gap};
  if (!AllFinite(all)) {
    throw Error(ErrorKind::kInvalidArgument, "non-finite one-mass parameter");
  }
  if (!(beta > 0.0)) throw Error(ErrorKind::kInvalidArgument, "beta must be > 0");
  if (!(rest_gap > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "rest_gap must be > 0");
  }
}

std::array<double, 4> OneMassRhs(std::span<const double> s,
                                 const OneMassParams& p) {
  const double xl = s[0], vl = s[1], xr = s[2], vr = s[3];
  const double drive = p.alpha * (vl + vr);
  return {
      vl,
      drive - p.beta * (1.0 + xl * xl) * vl - (1.0 - 0.5 * p.delta) * xl,
      vr,
      drive - p.beta * (1.0 + xr * xr) * vr - (1.0 + 0.5 * p.delta) * xr,
  };
}

void OneMassJacobians(std::span<const double> s, const OneMassParams& p,
                      std::array<double, 16>& J, std::array<double, 12>& P) {
  const double xl = s[0], vl = s[1], xr = s[2], vr = s[3];
  J.fill(0.0);
  P.fill(0.0);
  J[0 * 4 + 1] = 1.0;
  J[1 * 4 + 0] = -2.0 * p.beta * xl * vl - (1.0 - 0.5 * p.delta);
  J[1 * 4 + 1] = p.alpha - p.beta * (1.0 + xl * xl);
  J[1 * 4 + 3] = p.alpha;
  J[2 * 4 + 3] = 1.0;
  J[3 * 4 + 1] = p.alpha;
  J[3 * 4 + 2] = -2.0 * p.beta * xr * vr - (1.0 + 0.5 * p.delta);
  J[3 * 4 + 3] = p.alpha - p.beta * (1.0 + xr * xr);
  // columns: alpha, beta, delta
  P[1 * 3 + 0] = vl + vr;
  P[1 * 3 + 1] = -(1.0 + xl * xl) * vl;
  P[1 * 3 + 2] = 0.5 * xl;
  P[3 * 3 + 0] = vl + vr;
  P[3 * 3 + 1] = -(1.0 + xr * xr) * vr;
  P[3 * 3 + 2] = -0.5 * xr;
}

void TwoMassParams::Validate() const {
  if (!(m1 > 0 && m2 > 0 && k1 > 0 && k2 > 0 && a01 > 0 && a02 > 0)) {
    throw Error(ErrorKind::kInvalidArgument,
                "two-mass masses, stiffnesses and rest areas must be > 0");
  }
  if (!(q > 0.0 && q <= 2.0)) {
    throw Error(ErrorKind::kInvalidArgument, "asymmetry q must be in (0, 2]");
  }
  if (!(length > 0 && d1 > 0 && d2 > 0 && kc >= 0 && zeta1 >= 0 && zeta2 >= 0)) {
    throw Error(ErrorKind::kInvalidArgument, "invalid two-mass constants");
  }
}

namespace {

struct FoldConstants {
  double m1, m2, k1, k2;
};

// Accelerations of one fold's two masses given the shared aerodynamic state.
void FoldAccel(const FoldConstants& f, const TwoMassParams& p, double x1,
               double v1, double x2, double v2, double a1, double a2,
               double p1, double& acc1, double& acc2) {
  const double r1 = 2.0 * p.zeta1 * std::sqrt(f.m1 * f.k1);
  const double r2 = 2.0 * p.zeta2 * std::sqrt(f.m2 * f.k2);
  double force1 = p1 * p.length * p.d1 - r1 * v1 - f.k1 * x1 - p.kc * (x1 - x2);
  double force2 = -r2 * v2 - f.k2 * x2 - p.kc * (x2 - x1);
  if (a1 <= 0.0) force1 -= p.collision_factor * f.k1 * a1 / (2.0 * p.length);
  if (a2 <= 0.0) force2 -= p.collision_factor * f.k2 * a2 / (2.0 * p.length);
  acc1 = force1 / f.m1;
  acc2 = force2 / f.m2;
}

}  // namespace

std::array<double, 8> TwoMassRhs(std::span<const double> s,
                                 const TwoMassParams& p) {
  const double x1l = s[0], v1l = s[1], x2l = s[2], v2l = s[3];
  const double x1r = s[4], v1r = s[5], x2r = s[6], v2r = s[7];
  const double a1 = p.a01 + p.length * (x1l + x1r);
  const double a2 = p.a02 + p.length * (x2l + x2r);
  const double amin = std::min(a1, a2);
  // Lower masses only; the Bernoulli reduction applies while the glottis is open.
  double p1 = 0.0;
  if (a1 > 0.0) {
    p1 = amin > 0.0 ? p.ps * (1.0 - (amin / a1) * (amin / a1)) : p.ps;
  }
  const FoldConstants left{p.m1, p.m2, p.k1, p.k2};
  const FoldConstants right{p.m1 / p.q, p.m2 / p.q, p.k1 * p.q, p.k2 * p.q};
  std::array<double, 8> d{};
  d[0] = v1l;
  d[2] = v2l;
  d[4] = v1r;
  d[6] = v2r;
  FoldAccel(left, p, x1l, v1l, x2l, v2l, a1, a2, p1, d[1], d[3]);
  FoldAccel(right, p, x1r, v1r, x2r, v2r, a1, a2, p1, d[5], d[7]);
  return d;
}

double TwoMassEnergy(std::span<const double> s, const TwoMassParams& p) {
  const FoldConstants folds[2] = {{p.m1, p.m2, p.k1, p.k2},
                                  {p.m1 / p.q, p.m2 / p.q, p.k1 * p.q, p.k2 * p.q}};
  double e = 0.0;
  for (int f = 0; f < 2; ++f) {
    const double x1 = s[4 * f], v1 = s[4 * f + 1], x2 = s[4 * f + 2],
                 v2 = s[4 * f + 3];
    e += 0.5 * folds[f].m1 * v1 * v1 + 0.5 * folds[f].m2 * v2 * v2 +
         0.5 * folds[f].k1 * x1 * x1 + 0.5 * folds[f].k2 * x2 * x2 +
         0.5 * p.kc * (x1 - x2) * (x1 - x2);
  }
  return e;
}

NumericalOverflow::NumericalOverflow(const std::string& detail,
                                     TrajectorySet partial)
    : Error(ErrorKind::kNumericalOverflow, detail),
      partial_(std::move(partial)) {}

TrajectorySet IntegrateRk4(const RhsFn& rhs, std::span<const double> state0,
                           double dt, std::size_t n_steps) {
  if (!(dt > 0.0) || n_steps < 1) {
    throw Error(ErrorKind::kInvalidArgument, "need dt > 0 and n_steps >= 1");
  }
  const std::size_t dim = state0.size();
  TrajectorySet traj;
  traj.dt = dt;
  traj.states.resize(static_cast<Eigen::Index>(n_steps + 1),
                     static_cast<Eigen::Index>(dim));
  traj.times.resize(n_steps + 1);

  std::vector<double> s(state0.begin(), state0.end());
  std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
  auto record = [&](std::size_t i) {
    traj.times[i] = static_cast<double>(i) * dt;
    std::copy(s.begin(), s.end(), traj.states.data() + i * dim);
  };
  record(0);
  for (std::size_t i = 0; i < n_steps; ++i) {
    rhs(s, k1);
    for (std::size_t j = 0; j < dim; ++j) tmp[j] = s[j] + 0.5 * dt * k1[j];
    rhs(tmp, k2);
    for (std::size_t j = 0; j < dim; ++j) tmp[j] = s[j] + 0.5 * dt * k2[j];
    rhs(tmp, k3);
    for (std::size_t j = 0; j < dim; ++j) tmp[j] = s[j] + dt * k3[j];
    rhs(tmp, k4);
    for (std::size_t j = 0; j < dim; ++j) {
      s[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    }
    if (!AllFinite(s)) {
      TrajectorySet partial;
      partial.dt = dt;
      partial.states = traj.states.topRows(static_cast<Eigen::Index>(i + 1));
      partial.times.assign(traj.times.begin(),
                           traj.times.begin() + static_cast<long>(i + 1));
      throw NumericalOverflow("non-finite state at step " + std::to_string(i + 1),
                              std::move(partial));
    }
    record(i + 1);
  }
  return traj;
}

TrajectorySet SimulateOneMass(const OneMassParams& p, double dt,
                              std::size_t n_steps) {
  p.Validate();
  if (dt > kOneMassMaxDt) {
    throw Error(ErrorKind::kInvalidArgument, "one-mass dt must be <= 0.05");
  }
  const auto s0 = p.initial_state();
  return IntegrateRk4(
      [&p](std::span<const double> s, std::span<double> d) {
        const auto r = OneMassRhs(s, p);
        std::copy(r.begin(), r.end(), d.begin());
      },
      s0, dt, n_steps);
}

TrajectorySet SimulateTwoMass(const TwoMassParams& p, double dt_ms,
                              std::size_t n_steps) {
  p.Validate();
  if (dt_ms > kTwoMassMaxDtMs) {
    throw Error(ErrorKind::kInvalidArgument, "two-mass dt must be <= 1e-5 s");
  }
  return IntegrateRk4(
      [&p](std::span<const double> s, std::span<double> d) {
        const auto r = TwoMassRhs(s, p);
        std::copy(r.begin(), r.end(), d.begin());
      },
      p.x0, dt_ms, n_steps);
}

GlottalFlowSignal ModelFlow(const TrajectorySet& traj, const OneMassParams& p) {
  if (traj.dim() != 4) {
    throw Error(ErrorKind::kDimensionMismatch, "model flow needs a 1-mass trajectory");
  }
  std::vector<double> u(traj.num_states());
  double peak = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    u[i] = RawModelFlow(traj.at(i, 0), traj.at(i, 2), p.rest_gap);
    peak = std::max(peak, u[i]);
  }
  if (!(peak > 0.0)) {
    throw Error(ErrorKind::kDegenerateFlow, "folds never open");
  }
  return MakeFlowSignal(std::move(u), 1.0 / traj.dt, true);
}

FlowSamples SampleModelFlow(const TrajectorySet& traj, double rest_gap,
                            std::span<const double> times) {
  if (traj.dim() != 4 || traj.num_states() < 2) {
    throw Error(ErrorKind::kDimensionMismatch, "flow sampling needs a 1-mass trajectory");
  }
  const std::size_t last = traj.num_states() - 1;
  const double dt = traj.dt;
  FlowSamples out;
  out.u.resize(times.size());
  out.du.resize(times.size());
  out.node.resize(times.size());
  out.frac.resize(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double pos = times[k] / dt;
    if (!(pos >= 0.0) || pos > static_cast<double>(last)) {
      throw Error(ErrorKind::kInvalidArgument, "sample time outside trajectory");
    }
    std::size_t i = std::min(static_cast<std::size_t>(pos), last - 1);
    const double s = pos - static_cast<double>(i);
    const auto h = HermiteBasis(s);
    const auto hd = HermiteBasisDeriv(s);
    const auto a = traj.state(i);
    const auto b = traj.state(i + 1);
    const double z = rest_gap + h[0] * (a[0] + a[2]) + h[1] * dt * (a[1] + a[3]) +
                     h[2] * (b[0] + b[2]) + h[3] * dt * (b[1] + b[3]);
    const double dz = (hd[0] * (a[0] + a[2]) + hd[1] * dt * (a[1] + a[3]) +
                       hd[2] * (b[0] + b[2]) + hd[3] * dt * (b[1] + b[3])) /
                      dt;
    out.u[k] = z > 0.0 ? z : 0.0;
    out.du[k] = z > 0.0 ? dz : 0.0;
    out.node[k] = i;
    out.frac[k] = s;
  }
  return out;
}

double MeanCyclePeriod(const TrajectorySet& traj, std::size_t col,
                       std::size_t from, std::size_t cycles) {
  std::vector<double> crossings;
  for (std::size_t i = from; i + 1 < traj.num_states(); ++i) {
    const double a = traj.at(i, col), b = traj.at(i + 1, col);
    if (a < 0.0 && b >= 0.0) {
      crossings.push_back((static_cast<double>(i) + a / (a - b)) * traj.dt);
    }
  }
  if (crossings.size() < 2) return 0.0;
  const std::size_t use = std::min(cycles, crossings.size() - 1);
  return (crossings.back() - crossings[crossings.size() - 1 - use]) /
         static_cast<double>(use);
}

}  // namespace glottkit
