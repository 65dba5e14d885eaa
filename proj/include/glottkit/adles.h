// glottkit/adles.h

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

#ifndef GLOTTKIT_ADLES_H_
#define GLOTTKIT_ADLES_H_

#include <array>
#include <cstdint>
#include <vector>

#include "glottkit/audio.h"
#include "glottkit/flow.h"
#include "glottkit/fold_models.h"
#include "glottkit/lpc.h"

namespace glottkit {

// How model flow is compared with the target.
enum class Observation {
  kFlow,             // sampled model flow
  kInverseFiltered,  // model flow passed through the same difference,
                     // prefix-zeroing and leaky-integration chain as iaif
};

struct SimConfig {
  double dt = 0.02;          // model time step
  double warmup = 60.0;      // model time discarded before the target window
  int phase_grid = 64;       // coarse alignment offsets over one model cycle
  double fmin = 60.0;        // f0 search band for the target
  double fmax = 400.0;
  double f0 = 0.0;           // > 0 skips the f0 estimate
  Observation observation = Observation::kFlow;
  double leak = 0.99;        // kInverseFiltered only
  int zero_prefix = 0;       // kInverseFiltered only; samples zeroed after differencing
};

// Alignment between target samples and model time, refined per evaluation:
// tau_k = warmup + phase + rate * 2*pi*f0*k/fs, observation scaled by gain.
struct Alignment {
  double phase = 0.0;
  double rate = 1.0;
  double gain = 1.0;
  double model_period = 0.0;
};

struct LossEval {
  double loss = 0.0;
  Alignment alignment;
  std::array<double, 3> grad{};  // filled by the adjoint path only
};

// Mean squared error between the observed model flow and the target, after
// aligning phase, rate and gain. Throws kUnvoicedTarget when no f0 is found
// and kDegenerateFlow when the model never opens.
double FitLoss(const OneMassParams& p, const GlottalFlowSignal& target,
               const SimConfig& sim = {});
LossEval EvaluateFit(const OneMassParams& p, const GlottalFlowSignal& target,
                     const SimConfig& sim = {}, bool with_gradient = false);

// Central differences on (alpha, beta, delta); alignment re-solved at each
// probe.
std::array<double, 3> GradFd(const OneMassParams& p,
                             const GlottalFlowSignal& target,
                             const SimConfig& sim = {}, double eps = 1e-6);

// Discrete adjoint through every RK4 stage with the alignment held at its
// optimum.
std::array<double, 3> GradAdjoint(const OneMassParams& p,
                                  const GlottalFlowSignal& target,
                                  const SimConfig& sim = {});

struct OptConfig {
  SimConfig sim;
  int max_iter = 500;
  double grad_tol = 1e-9;
  double armijo_c = 1e-4;
  double shrink = 0.5;
  int max_backtracks = 40;
  // When the initial delta is within this of zero, a coarse scan over
  // delta replaces it (the loss is flat in delta at a symmetric point).
  double delta_scan_threshold = 1e-3;
  std::vector<double> delta_scan = {0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35,
                                    0.4,  0.45, 0.5, 0.6, 0.7, 0.8, 0.9};
  double alpha_lo = 0.0, alpha_hi = 2.0;
  double beta_lo = 1e-3, beta_hi = 2.0;
  double delta_lo = -1.0, delta_hi = 1.0;
};

struct FitResult {
  OneMassParams params;
  std::vector<double> loss_curve;
  double grad_norm_final = 0.0;
  int iterations = 0;
  bool converged = false;
  double f0 = 0.0;
  double samples_per_cycle = 0.0;
  Alignment alignment;
};

// Projected gradient descent with a Barzilai-Borwein trial step and Armijo
// backtracking. Initial conditions stay at the defaults. Flow is symmetric
// under a left-right swap, so the sign of delta is not identifiable; the
// result reports |delta|.
FitResult EstimateParams(const GlottalFlowSignal& target,
                         const OneMassParams& init, const OptConfig& opt = {});

// Model flow observed exactly as EvaluateFit observes it, at the given
// alignment phase with rate = model_period / 2pi and gain 1/max.
GlottalFlowSignal ModelTarget(const OneMassParams& p, double f0,
                              double sample_rate, std::size_t n_samples,
                              const SimConfig& sim = {}, double phase = 0.0);

// Glottal flow target recovered from audio by iaif over a centred segment.
GlottalFlowSignal FlowTargetFromAudio(const AudioBuffer& buf,
                                      double segment_sec = 0.1,
                                      const IaifConfig& cfg = {});

// Adds seeded white Gaussian noise at the given SNR (dB, relative to the
// signal's mean power) and renormalizes.
GlottalFlowSignal AddNoise(const GlottalFlowSignal& target, double snr_db,
                           std::uint64_t seed);

}  // namespace glottkit

#endif  // GLOTTKIT_ADLES_H_
