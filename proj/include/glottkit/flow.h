// glottkit/flow.h

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

#ifndef GLOTTKIT_FLOW_H_
#define GLOTTKIT_FLOW_H_

#include <vector>

namespace glottkit {

// Glottal volume-velocity waveform, either recovered by inverse filtering or
// produced by a fold model. When `normalized` is set, max|flow| == 1.
// flow_deriv[n] = (flow[n] - flow[n-1]) * sample_rate, with flow[-1] taken
// as flow[0] so that flow_deriv[0] == 0.
struct GlottalFlowSignal {
  std::vector<double> flow;
  std::vector<double> flow_deriv;
  double sample_rate = 0.0;
  bool normalized = false;

  std::size_t size() const { return flow.size(); }
};

// Builds the derivative and optionally peak-normalizes. Throws
// Error(kNonNormalizable) when normalization is requested on an all-zero flow.
GlottalFlowSignal MakeFlowSignal(std::vector<double> flow, double sample_rate,
                                 bool normalize);

}  // namespace glottkit

#endif  // GLOTTKIT_FLOW_H_
