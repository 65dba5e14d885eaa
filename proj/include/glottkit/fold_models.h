// glottkit/fold_models.h

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

#ifndef GLOTTKIT_FOLD_MODELS_H_
#define GLOTTKIT_FOLD_MODELS_H_

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "glottkit/audio.h"
#include "glottkit/error.h"
#include "glottkit/flow.h"

namespace glottkit {

// Asymmetric coupled van der Pol-type body-cover model, one mass per fold.
// State layout (x_l, v_l, x_r, v_r), dimensionless time.
struct OneMassParams {
  double alpha = 0.6;   // glottal pressure coupling
  double beta = 0.32;   // damping / nonlinearity
  double delta = 0.0;   // left-right stiffness asymmetry (right stiffer if > 0)
  double x0_l = 0.1, v0_l = 0.0, x0_r = 0.1, v0_r = 0.0;
  double rest_gap = 0.1;  // baseline glottal half-width

  std::array<double, 4> initial_state() const {
    return {x0_l, v0_l, x0_r, v0_r};
  }
  // Throws kInvalidArgument unless beta > 0, rest_gap > 0 and all finite.
  void Validate() const;
};

std::array<double, 4> OneMassRhs(std::span<const double> s,
                                 const OneMassParams& p);

// d(rhs)/d(state), row-major 4x4, and d(rhs)/d(alpha, beta, delta), 4x3.
void OneMassJacobians(std::span<const double> s, const OneMassParams& p,
                      std::array<double, 16>& d_state,
                      std::array<double, 12>& d_params);

// Two-mass model per fold (lower mass 1, upper mass 2), Steinecke-Herzel
// style. Units: g, cm, ms. State layout
// (x1_l, v1_l, x2_l, v2_l, x1_r, v1_r, x2_r, v2_r).
struct TwoMassParams {
  double m1 = 0.125, m2 = 0.025;
  double k1 = 0.08, k2 = 0.008;
  double kc = 0.025;
  double zeta1 = 0.1, zeta2 = 0.1;  // damping ratios
  double ps = 0.008;                // subglottal pressure
  double q = 1.0;                   // right fold: k * q, m / q
  double a01 = 0.05, a02 = 0.05;    // rest areas, cm^2
  double length = 1.4;              // fold length, cm
  double d1 = 0.25, d2 = 0.05;      // mass depths, cm
  double collision_factor = 3.0;    // contact stiffness = factor * k_i
  std::array<double, 8> x0 = {0.01, 0.0, 0.01, 0.0, 0.01, 0.0, 0.01, 0.0};

  // Throws kInvalidArgument unless masses, stiffnesses and rest areas are
  // positive and q is in (0, 2].
  void Validate() const;
};

std::array<double, 8> TwoMassRhs(std::span<const double> s,
                                 const TwoMassParams& p);

// Kinetic plus spring energy, collision and pressure terms excluded.
double TwoMassEnergy(std::span<const double> s, const TwoMassParams& p);

// Uniformly sampled state history; row i is the state after i steps.
struct TrajectorySet {
  std::vector<double> times;
  RowMatrix states;
  double dt = 0.0;

  std::size_t num_states() const { return static_cast<std::size_t>(states.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(states.cols()); }
  double at(std::size_t i, std::size_t j) const {
    return states(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  std::span<const double> state(std::size_t i) const {
    return {states.data() + i * dim(), dim()};
  }
};

// Thrown when an integration step produces a non-finite state; carries the
// finite prefix of the trajectory.
class NumericalOverflow : public Error {
 public:
  NumericalOverflow(const std::string& detail, TrajectorySet partial);
  const TrajectorySet& partial() const { return partial_; }

 private:
  TrajectorySet partial_;
};

using RhsFn = std::function<void(std::span<const double>, std::span<double>)>;

// Classical fixed-step RK4. Records state0 and every subsequent step, so the
// result holds n_steps + 1 states.
TrajectorySet IntegrateRk4(const RhsFn& rhs, std::span<const double> state0,
                           double dt, std::size_t n_steps);

inline constexpr double kOneMassMaxDt = 0.05;
inline constexpr double kTwoMassMaxDtMs = 0.01;  // 1e-5 s

TrajectorySet SimulateOneMass(const OneMassParams& p, double dt,
                              std::size_t n_steps);
TrajectorySet SimulateTwoMass(const TwoMassParams& p, double dt_ms,
                              std::size_t n_steps);

// u(t) = max(0, rest_gap + x_l(t) + x_r(t)), amplitude-normalized, sampled at
// 1/dt. Throws kDegenerateFlow when the folds never open.
GlottalFlowSignal ModelFlow(const TrajectorySet& traj, const OneMassParams& p);

inline double RawModelFlow(double x_l, double x_r, double rest_gap) {
  const double u = rest_gap + x_l + x_r;
  return u > 0.0 ? u : 0.0;
}

// Model flow evaluated at arbitrary model times by cubic Hermite interpolation
// of displacement, using the recorded velocities as nodal slopes. `du` is the
// exact time derivative of the interpolated, clipped flow. Times must lie in
// [0, last recorded time].
struct FlowSamples {
  std::vector<double> u;
  std::vector<double> du;
  std::vector<std::size_t> node;   // left grid index per sample
  std::vector<double> frac;        // position within the step, in [0, 1]
};
FlowSamples SampleModelFlow(const TrajectorySet& traj, double rest_gap,
                            std::span<const double> times);

// Hermite basis at fraction s: h00, h10, h01, h11.
inline std::array<double, 4> HermiteBasis(double s) {
  const double s2 = s * s, s3 = s2 * s;
  return {2 * s3 - 3 * s2 + 1, s3 - 2 * s2 + s, -2 * s3 + 3 * s2, s3 - s2};
}
inline std::array<double, 4> HermiteBasisDeriv(double s) {
  const double s2 = s * s;
  return {6 * s2 - 6 * s, 3 * s2 - 4 * s + 1, -6 * s2 + 6 * s, 3 * s2 - 2 * s};
}

// Mean spacing of the last `cycles` upward zero crossings of state column
// `col` at or after step `from`; 0 when fewer than two crossings exist.
double MeanCyclePeriod(const TrajectorySet& traj, std::size_t col,
                       std::size_t from, std::size_t cycles);

}  // namespace glottkit

#endif  // GLOTTKIT_FOLD_MODELS_H_
