// glottkit/phase_features.h

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

#ifndef GLOTTKIT_PHASE_FEATURES_H_
#define GLOTTKIT_PHASE_FEATURES_H_

#include <filesystem>
#include <string>
#include <vector>

#include "glottkit/fold_models.h"

namespace glottkit {

enum class Fold { kLeft, kRight };

struct PhasePoint {
  double x = 0.0;  // displacement
  double v = 0.0;  // velocity
};
using Portrait = std::vector<PhasePoint>;

// Displacement-velocity pairs of one fold, chronological. Throws
// kInvalidArgument for fewer than two recorded states.
Portrait PhasePortrait(const TrajectorySet& traj, Fold fold);

// Absolute shoelace area of a closed polygon.
double PolygonArea(const Portrait& polygon);

// Cycles delimited by upward zero crossings of x, each closed by the
// linearly interpolated crossing points.
std::vector<Portrait> DetectCycles(const Portrait& portrait);

// Area of the last full cycle within the trailing `tail_fraction` of the
// portrait. Throws kNoCycleDetected when that tail holds no full cycle.
double LimitCycleArea(const Portrait& portrait, double tail_fraction = 0.5);

// RMS(x_l - x_r) / (RMS(x_l) + RMS(x_r) + 1e-12) over the last half of the
// recorded steps.
double AsymmetryIndex(const TrajectorySet& traj);

// Symmetric Hausdorff distance between polylines, measured point to segment.
double HausdorffDistance(const Portrait& a, const Portrait& b);

// Mean Hausdorff distance between consecutive cycles over the mean cycle
// diameter. Throws kNoCycleDetected below two cycles.
double CycleVariability(const Portrait& portrait);

struct LabeledPortrait {
  std::string label;
  Portrait points;
};

// Standalone SVG with one polyline per portrait, axes and a legend. Output
// bytes depend only on the input. Throws kIoError when the file cannot be
// written and kInvalidArgument for an empty list.
void RenderSvg(const std::vector<LabeledPortrait>& portraits,
               const std::filesystem::path& path);
std::string SvgDocument(const std::vector<LabeledPortrait>& portraits);

}  // namespace glottkit

#endif  // GLOTTKIT_PHASE_FEATURES_H_
