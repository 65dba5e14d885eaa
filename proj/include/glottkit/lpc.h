// glottkit/lpc.h

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

#ifndef GLOTTKIT_LPC_H_
#define GLOTTKIT_LPC_H_

#include <complex>
#include <span>
#include <vector>

#include "glottkit/flow.h"

namespace glottkit {

// All-pole model with predictor convention x^[n] = sum_k a_k x[n-k].
struct LpcModel {
  std::vector<double> coeffs;      // a_1 .. a_p
  std::vector<double> reflection;  // k_1 .. k_p
  double gain = 0.0;               // sqrt of final prediction-error power
  int order() const { return static_cast<int>(coeffs.size()); }
};

// r[k] = sum_n x[n] x[n+k], k = 0..max_lag. Throws kLagTooLarge when
// max_lag >= len(frame).
std::vector<double> Autocorrelation(std::span<const double> frame,
                                    std::size_t max_lag);

// Throws kSingularAutocorrelation when r[0] <= 0 or the prediction error
// vanishes before the requested order is reached.
LpcModel LevinsonDurbin(std::span<const double> r, int order);

// Hann-windowed autocorrelation LPC of a frame.
LpcModel LpcAnalysis(std::span<const double> frame, int order);

// e[n] = x[n] - sum_k a_k x[n-k], zero initial history.
std::vector<double> InverseFilter(std::span<const double> frame,
                                  const LpcModel& model);

// x[n] = e[n] + sum_k a_k x[n-k], zero initial history.
std::vector<double> AllPoleFilter(std::span<const double> excitation,
                                  const LpcModel& model);

// Roots of 1 - sum_k a_k z^-k, i.e. the poles of the synthesis filter.
std::vector<std::complex<double>> LpcPoles(const LpcModel& model);

// Pole frequencies (Hz) with positive imaginary part, ascending. Poles whose
// bandwidth exceeds `max_bandwidth_hz` are dropped.
std::vector<double> PoleFrequencies(const LpcModel& model, double sample_rate,
                                    double max_bandwidth_hz);

struct IaifConfig {
  int tract_order = 0;   // 0 selects 2 + sample_rate / 1000
  double leak = 0.99;    // lip-radiation integrator y[n] = e[n] + leak*y[n-1]
  double min_f0 = 60.0;  // frame must hold >= 3 periods at this f0
  bool normalize = true;
};

int DefaultTractOrder(double sample_rate);

// Two-pass iterative adaptive inverse filtering:
//   1. order-1 LPC estimates the coarse glottal tilt, removed from the frame;
//   2. order-p LPC on the tilt-free frame models the vocal tract, and the
//      original frame is inverse filtered with it (the first p residual
//      samples, which lack history, are zeroed);
//   3. the residual is leaky-integrated to cancel lip radiation.
GlottalFlowSignal Iaif(std::span<const double> frame, double sample_rate,
                       const IaifConfig& cfg = {});

}  // namespace glottkit

#endif  // GLOTTKIT_LPC_H_
