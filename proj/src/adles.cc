// glottkit/adles.cc

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

#include "glottkit/adles.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "glottkit/error.h"
#include "glottkit/pitch.h"

namespace glottkit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kPeriodCycles = 8;

struct Prepared {
  std::vector<double> y;
  std::vector<double> theta;
  double f0 = 0.0;
  double fs = 0.0;
};

Prepared Prepare(const GlottalFlowSignal& target, const SimConfig& sim) {
  if (target.size() < 2 || !(target.sample_rate > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "target needs >= 2 samples and a rate");
  }
  Prepared t;
  t.fs = target.sample_rate;
  t.y = target.flow;
  if (sim.f0 > 0.0) {
    t.f0 = sim.f0;
  } else {
    std::vector<double> centred = target.flow;
    double mean = 0.0;
    for (double v : centred) mean += v;
    mean /= static_cast<double>(centred.size());
    for (double& v : centred) v -= mean;
    const double fmax = std::min(sim.fmax, 0.499 * t.fs);
    const auto f0 = EstimateF0(centred, t.fs, sim.fmin, fmax);
    if (!f0) throw Error(ErrorKind::kUnvoicedTarget, "no f0 found in target flow");
    t.f0 = *f0;
  }
  t.theta.resize(t.y.size());
  for (std::size_t k = 0; k < t.y.size(); ++k) {
    t.theta[k] = kTwoPi * t.f0 * static_cast<double>(k) / t.fs;
  }
  return t;
}

// Linear observation chain applied in place to sampled flow.
void Observe(const SimConfig& sim, std::vector<double>& v) {
  if (sim.observation == Observation::kFlow) return;
  const std::size_t n = v.size();
  const std::size_t zero = std::max<std::size_t>(1, static_cast<std::size_t>(
                                                        std::max(sim.zero_prefix, 0)));
  std::vector<double> d(n, 0.0);
  for (std::size_t k = zero; k < n; ++k) d[k] = v[k] - v[k - 1];
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    acc = d[k] + sim.leak * acc;
    v[k] = acc;
  }
}

// Transpose of Observe.
void ObserveAdjoint(const SimConfig& sim, std::vector<double>& g) {
  if (sim.observation == Observation::kFlow) return;
  const std::size_t n = g.size();
  const std::size_t zero = std::max<std::size_t>(1, static_cast<std::size_t>(
                                                        std::max(sim.zero_prefix, 0)));
  std::vector<double> d(n, 0.0);
  double acc = 0.0;
  for (std::size_t k = n; k-- > 0;) {
    acc = g[k] + sim.leak * acc;
    d[k] = k >= zero ? acc : 0.0;
  }
  for (std::size_t k = 0; k < n; ++k) {
    g[k] = d[k] - (k + 1 < n ? d[k + 1] : 0.0);
  }
}

struct Simulation {
  TrajectorySet traj;
  double period = 0.0;
  double horizon = 0.0;
};

OneMassParams WithDefaultInitialState(OneMassParams p) {
  const OneMassParams d;
  p.x0_l = d.x0_l;
  p.v0_l = d.v0_l;
  p.x0_r = d.x0_r;
  p.v0_r = d.v0_r;
  return p;
}

std::size_t StepsFor(double horizon, double dt) {
  return static_cast<std::size_t>(std::ceil(horizon / dt)) + 2;
}

Simulation Simulate(const OneMassParams& p, const SimConfig& sim,
                    double theta_end) {
  if (!(sim.dt > 0.0) || !(sim.warmup > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "dt and warmup must be > 0");
  }
  const double cycles = theta_end / kTwoPi;
  Simulation s;
  s.horizon = sim.warmup + 1.5 * kTwoPi * (cycles + 3.0);
  s.traj = SimulateOneMass(p, sim.dt, StepsFor(s.horizon, sim.dt));
  const std::size_t from = static_cast<std::size_t>(sim.warmup / sim.dt);
  s.period = MeanCyclePeriod(s.traj, 0, from, kPeriodCycles);
  if (!(s.period > 0.0)) s.period = kTwoPi;
  const double need = sim.warmup + s.period * (1.25 * cycles + 3.0);
  if (need > s.horizon) {
    s.horizon = need;
    s.traj = SimulateOneMass(p, sim.dt, StepsFor(s.horizon, sim.dt));
  }
  return s;
}

struct Observed {
  FlowSamples flow;
  std::vector<double> o;
};

bool TimesInside(const Simulation& s, const SimConfig& sim, const Prepared& t,
                 double phase, double rate) {
  const double first = sim.warmup + phase;
  const double last = sim.warmup + phase + rate * t.theta.back();
  const double end = static_cast<double>(s.traj.num_states() - 1) * s.traj.dt;
  return first >= 0.0 && last <= end && rate > 0.0;
}

Observed ObserveAt(const Simulation& s, const OneMassParams& p,
                   const SimConfig& sim, const Prepared& t, double phase,
                   double rate) {
  std::vector<double> taus(t.theta.size());
  for (std::size_t k = 0; k < taus.size(); ++k) {
    taus[k] = sim.warmup + phase + rate * t.theta[k];
  }
  Observed ob;
  ob.flow = SampleModelFlow(s.traj, p.rest_gap, taus);
  ob.o = ob.flow.u;
  Observe(sim, ob.o);
  return ob;
}

double BestGain(const std::vector<double>& o, const std::vector<double>& y) {
  double oy = 0.0, oo = 0.0;
  for (std::size_t k = 0; k < o.size(); ++k) {
    oy += o[k] * y[k];
    oo += o[k] * o[k];
  }
  return oo > 0.0 ? oy / oo : 0.0;
}

double Mse(const std::vector<double>& o, const std::vector<double>& y, double c) {
  double acc = 0.0;
  for (std::size_t k = 0; k < o.size(); ++k) {
    const double r = c * o[k] - y[k];
    acc += r * r;
  }
  return acc / static_cast<double>(o.size());
}

// Coarse phase grid followed by Levenberg-Marquardt on (phase, rate, gain).
Alignment Align(const Simulation& s, const OneMassParams& p,
                const SimConfig& sim, const Prepared& t, double& loss_out) {
  const double period = s.period;
  const int grid = std::max(sim.phase_grid, 1);
  Alignment a;
  a.model_period = period;
  a.rate = period / kTwoPi;
  double best = std::numeric_limits<double>::infinity();
  for (int j = 0; j < grid; ++j) {
    const double phase = period * j / grid;
    if (!TimesInside(s, sim, t, phase, a.rate)) continue;
    const auto ob = ObserveAt(s, p, sim, t, phase, a.rate);
    const double c = BestGain(ob.o, t.y);
    const double l = Mse(ob.o, t.y, c);
    if (l < best) {
      best = l;
      a.phase = phase;
      a.gain = c;
    }
  }
  if (!std::isfinite(best)) {
    throw Error(ErrorKind::kInvalidArgument, "target longer than simulation horizon");
  }

  const std::size_t n = t.y.size();
  double lambda = 1e-3;
  double loss = best;
  for (int iter = 0; iter < 100; ++iter) {
    const auto ob = ObserveAt(s, p, sim, t, a.phase, a.rate);
    std::vector<double> dphi = ob.flow.du;
    std::vector<double> drate(n);
    for (std::size_t k = 0; k < n; ++k) drate[k] = ob.flow.du[k] * t.theta[k];
    Observe(sim, dphi);
    Observe(sim, drate);
    Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
    Eigen::Vector3d jtr = Eigen::Vector3d::Zero();
    for (std::size_t k = 0; k < n; ++k) {
      const Eigen::Vector3d row(a.gain * dphi[k], a.gain * drate[k], ob.o[k]);
      const double r = a.gain * ob.o[k] - t.y[k];
      jtj += row * row.transpose();
      jtr += row * r;
    }
    bool accepted = false;
    Eigen::Vector3d step = Eigen::Vector3d::Zero();
    for (int tries = 0; tries < 30 && !accepted; ++tries) {
      Eigen::Matrix3d lhs = jtj;
      for (int d = 0; d < 3; ++d) lhs(d, d) += lambda * std::max(jtj(d, d), 1e-300);
      step = lhs.ldlt().solve(-jtr);
      if (!step.allFinite()) {
        lambda *= 10.0;
        continue;
      }
      const double phase = a.phase + step[0];
      const double rate = a.rate + step[1];
      if (!TimesInside(s, sim, t, phase, rate)) {
        lambda *= 4.0;
        continue;
      }
      const auto trial = ObserveAt(s, p, sim, t, phase, rate);
      const double l = Mse(trial.o, t.y, a.gain + step[2]);
      if (l <= loss) {
        accepted = true;
        a.phase = phase;
        a.rate = rate;
        a.gain += step[2];
        loss = l;
        lambda = std::max(lambda / 3.0, 1e-12);
      } else {
        lambda *= 4.0;
      }
    }
    if (!accepted) break;
    const double scale = std::abs(a.phase) + std::abs(a.rate) + std::abs(a.gain) + 1.0;
    if (step.cwiseAbs().maxCoeff() < 1e-13 * scale) break;
  }
  loss_out = loss;
  return a;
}

}  // namespace

LossEval EvaluateFit(const OneMassParams& p_in, const GlottalFlowSignal& target,
                     const SimConfig& sim, bool with_gradient) {
  const OneMassParams p = WithDefaultInitialState(p_in);
  const Prepared t = Prepare(target, sim);
  const Simulation s = Simulate(p, sim, t.theta.back());
  {
    bool opens = false;
    for (std::size_t i = 0; i < s.traj.num_states() && !opens; ++i) {
      opens = RawModelFlow(s.traj.at(i, 0), s.traj.at(i, 2), p.rest_gap) > 0.0;
    }
    if (!opens) throw Error(ErrorKind::kDegenerateFlow, "folds never open");
  }
  LossEval ev;
  ev.alignment = Align(s, p, sim, t, ev.loss);
  if (!with_gradient) return ev;

  const Alignment& a = ev.alignment;
  const auto ob = ObserveAt(s, p, sim, t, a.phase, a.rate);
  const std::size_t n = t.y.size();
  std::vector<double> g(n);
  for (std::size_t k = 0; k < n; ++k) {
    g[k] = 2.0 * a.gain * (a.gain * ob.o[k] - t.y[k]) / static_cast<double>(n);
  }
  ObserveAdjoint(sim, g);

  const double dt = s.traj.dt;
  const std::size_t steps = s.traj.num_states();
  std::vector<double> lam(steps * 4, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    if (!(ob.flow.u[k] > 0.0)) continue;
    const auto h = HermiteBasis(ob.flow.frac[k]);
    double* l0 = &lam[ob.flow.node[k] * 4];
    double* l1 = l0 + 4;
    const double w = g[k];
    l0[0] += h[0] * w;
    l0[2] += h[0] * w;
    l0[1] += h[1] * dt * w;
    l0[3] += h[1] * dt * w;
    l1[0] += h[2] * w;
    l1[2] += h[2] * w;
    l1[1] += h[3] * dt * w;
    l1[3] += h[3] * dt * w;
  }

  std::array<double, 3> pbar{};
  std::array<double, 16> J;
  std::array<double, 12> P;
  auto stage_back = [&](std::span<const double> y, const std::array<double, 4>& kbar,
                        std::array<double, 4>& ybar) {
    OneMassJacobians(y, p, J, P);
    for (int c = 0; c < 4; ++c) {
      double acc = 0.0;
      for (int r = 0; r < 4; ++r) acc += J[r * 4 + c] * kbar[r];
      ybar[c] = acc;
    }
    for (int q = 0; q < 3; ++q) {
      double acc = 0.0;
      for (int r = 0; r < 4; ++r) acc += P[r * 3 + q] * kbar[r];
      pbar[q] += acc;
    }
  };
  std::array<double, 4> y1, y2, y3, y4, kb, yb1, yb2, yb3, yb4;
  for (std::size_t i = steps - 1; i-- > 0;) {
    const auto y = s.traj.state(i);
    std::copy(y.begin(), y.end(), y1.begin());
    const auto k1 = OneMassRhs(y1, p);
    for (int j = 0; j < 4; ++j) y2[j] = y1[j] + 0.5 * dt * k1[j];
    const auto k2 = OneMassRhs(y2, p);
    for (int j = 0; j < 4; ++j) y3[j] = y1[j] + 0.5 * dt * k2[j];
    const auto k3 = OneMassRhs(y3, p);
    for (int j = 0; j < 4; ++j) y4[j] = y1[j] + dt * k3[j];

    const double* a_next = &lam[(i + 1) * 4];
    for (int j = 0; j < 4; ++j) kb[j] = dt / 6.0 * a_next[j];
    stage_back(y4, kb, yb4);
    for (int j = 0; j < 4; ++j) kb[j] = dt / 3.0 * a_next[j] + dt * yb4[j];
    stage_back(y3, kb, yb3);
    for (int j = 0; j < 4; ++j) kb[j] = dt / 3.0 * a_next[j] + 0.5 * dt * yb3[j];
    stage_back(y2, kb, yb2);
    for (int j = 0; j < 4; ++j) kb[j] = dt / 6.0 * a_next[j] + 0.5 * dt * yb2[j];
    stage_back(y1, kb, yb1);
    double* a_cur = &lam[i * 4];
    for (int j = 0; j < 4; ++j) {
      a_cur[j] += a_next[j] + yb1[j] + yb2[j] + yb3[j] + yb4[j];
    }
  }
  ev.grad = pbar;
  return ev;
}

double FitLoss(const OneMassParams& p, const GlottalFlowSignal& target,
               const SimConfig& sim) {
  return EvaluateFit(p, target, sim, false).loss;
}

std::array<double, 3> GradAdjoint(const OneMassParams& p,
                                  const GlottalFlowSignal& target,
                                  const SimConfig& sim) {
  return EvaluateFit(p, target, sim, true).grad;
}

namespace {

double& Coord(OneMassParams& p, int i) {
  return i == 0 ? p.alpha : (i == 1 ? p.beta : p.delta);
}

}  // namespace

std::array<double, 3> GradFd(const OneMassParams& p,
                             const GlottalFlowSignal& target,
                             const SimConfig& sim, double eps) {
  if (!(eps > 0.0)) throw Error(ErrorKind::kInvalidArgument, "eps must be > 0");
  std::array<double, 3> g{};
  for (int i = 0; i < 3; ++i) {
    OneMassParams hi = p, lo = p;
    Coord(hi, i) += eps;
    Coord(lo, i) -= eps;
    g[i] = (FitLoss(hi, target, sim) - FitLoss(lo, target, sim)) / (2.0 * eps);
  }
  return g;
}

namespace {

OneMassParams Project(OneMassParams p, const OptConfig& o) {
  p.alpha = std::clamp(p.alpha, o.alpha_lo, o.alpha_hi);
  p.beta = std::clamp(p.beta, o.beta_lo, o.beta_hi);
  p.delta = std::clamp(p.delta, o.delta_lo, o.delta_hi);
  return p;
}

double ProjectedGradNorm(const OneMassParams& p, const std::array<double, 3>& g,
                         const OptConfig& o) {
  OneMassParams q = p;
  for (int i = 0; i < 3; ++i) Coord(q, i) -= g[i];
  q = Project(q, o);
  OneMassParams pc = p;
  double acc = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double d = Coord(pc, i) - Coord(q, i);
    acc += d * d;
  }
  return std::sqrt(acc);
}

double SafeLoss(const OneMassParams& p, const GlottalFlowSignal& target,
                const SimConfig& sim) {
  try {
    return FitLoss(p, target, sim);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kUnvoicedTarget) throw;
    return std::numeric_limits<double>::infinity();
  }
}

}  // namespace

FitResult EstimateParams(const GlottalFlowSignal& target,
                         const OneMassParams& init, const OptConfig& opt) {
  FitResult res;
  const Prepared prep = Prepare(target, opt.sim);
  SimConfig sim = opt.sim;
  sim.f0 = prep.f0;
  res.f0 = prep.f0;
  res.samples_per_cycle = prep.fs / prep.f0;

  OneMassParams p = Project(WithDefaultInitialState(init), opt);
  if (std::abs(p.delta) < opt.delta_scan_threshold && !opt.delta_scan.empty()) {
    // Zero is a stationary point in delta for every (alpha, beta), so the
    // scan only considers nonzero values.
    double best = std::numeric_limits<double>::infinity();
    OneMassParams best_p = p;
    for (double d : opt.delta_scan) {
      OneMassParams q = p;
      q.delta = d;
      q = Project(q, opt);
      const double l = SafeLoss(q, target, sim);
      if (l < best) {
        best = l;
        best_p = q;
      }
    }
    p = best_p;
  }

  LossEval ev = EvaluateFit(p, target, sim, true);
  double loss = ev.loss;
  std::array<double, 3> g = ev.grad;
  res.loss_curve.push_back(loss);
  double gnorm = std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2]);
  double t = gnorm > 0.0 ? 0.05 / gnorm : 1.0;
  double pg = ProjectedGradNorm(p, g, opt);
  int iter = 0;
  while (iter < opt.max_iter) {
    if (pg < opt.grad_tol) {
      res.converged = true;
      break;
    }
    OneMassParams next;
    double next_loss = 0.0;
    bool accepted = false;
    double trial = t;
    for (int b = 0; b <= opt.max_backtracks; ++b) {
      next = p;
      for (int i = 0; i < 3; ++i) Coord(next, i) -= trial * g[i];
      next = Project(next, opt);
      double decrease = 0.0;
      for (int i = 0; i < 3; ++i) decrease += g[i] * (Coord(next, i) - Coord(p, i));
      next_loss = SafeLoss(next, target, sim);
      if (next_loss <= loss + opt.armijo_c * decrease) {
        accepted = true;
        break;
      }
      trial *= opt.shrink;
    }
    if (!accepted) break;
    ++iter;
    const LossEval nev = EvaluateFit(next, target, sim, true);
    double ss = 0.0, sy = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double sd = Coord(next, i) - Coord(p, i);
      const double yd = nev.grad[i] - g[i];
      ss += sd * sd;
      sy += sd * yd;
    }
    t = (sy > 0.0) ? std::clamp(ss / sy, 1e-10, 1e6) : 2.0 * trial;
    p = next;
    loss = std::min(next_loss, nev.loss);
    g = nev.grad;
    ev = nev;
    res.loss_curve.push_back(loss);
    pg = ProjectedGradNorm(p, g, opt);
  }
  if (!res.converged && pg < opt.grad_tol) res.converged = true;
  res.iterations = iter;
  res.grad_norm_final = pg;
  res.alignment = ev.alignment;
  p.delta = std::abs(p.delta);
  res.params = p;
  return res;
}

GlottalFlowSignal ModelTarget(const OneMassParams& p_in, double f0,
                              double sample_rate, std::size_t n_samples,
                              const SimConfig& sim, double phase) {
  if (!(f0 > 0.0) || !(sample_rate > 0.0) || n_samples < 2) {
    throw Error(ErrorKind::kInvalidArgument, "model target needs f0, rate, length");
  }
  const OneMassParams p = WithDefaultInitialState(p_in);
  Prepared t;
  t.f0 = f0;
  t.fs = sample_rate;
  t.y.assign(n_samples, 0.0);
  t.theta.resize(n_samples);
  for (std::size_t k = 0; k < n_samples; ++k) {
    t.theta[k] = kTwoPi * f0 * static_cast<double>(k) / sample_rate;
  }
  const Simulation s = Simulate(p, sim, t.theta.back());
  const double rate = s.period / kTwoPi;
  if (!TimesInside(s, sim, t, phase, rate)) {
    throw Error(ErrorKind::kInvalidArgument, "phase outside simulation horizon");
  }
  auto ob = ObserveAt(s, p, sim, t, phase, rate);
  return MakeFlowSignal(std::move(ob.o), sample_rate, true);
}

GlottalFlowSignal FlowTargetFromAudio(const AudioBuffer& buf, double segment_sec,
                                      const IaifConfig& cfg) {
  const auto len = static_cast<std::size_t>(std::lround(segment_sec * buf.sample_rate));
  if (len == 0) throw Error(ErrorKind::kInvalidArgument, "segment_sec must be > 0");
  if (buf.size() < len) {
    throw Error(ErrorKind::kFrameTooShort, "audio shorter than the fit segment");
  }
  const std::size_t start = (buf.size() - len) / 2;
  return Iaif(std::span<const double>(buf.samples).subspan(start, len),
              buf.sample_rate, cfg);
}

GlottalFlowSignal AddNoise(const GlottalFlowSignal& target, double snr_db,
                           std::uint64_t seed) {
  double power = 0.0;
  for (double v : target.flow) power += v * v;
  power /= static_cast<double>(std::max<std::size_t>(target.size(), 1));
  const double sigma = std::sqrt(power / std::pow(10.0, snr_db / 10.0));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, sigma);
  std::vector<double> noisy = target.flow;
  for (double& v : noisy) v += nd(rng);
  return MakeFlowSignal(std::move(noisy), target.sample_rate, true);
}

}  // namespace glottkit
