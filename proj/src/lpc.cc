// glottkit/lpc.cc

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

#include "glottkit/lpc.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "glottkit/error.h"

namespace glottkit {

GlottalFlowSignal MakeFlowSignal(std::vector<double> flow, double sample_rate,
                                 bool normalize) {
  GlottalFlowSignal sig;
  sig.sample_rate = sample_rate;
  if (normalize) {
    double peak = 0.0;
    for (double v : flow) peak = std::max(peak, std::abs(v));
    if (!(peak > 0.0) || !std::isfinite(peak)) {
      throw Error(ErrorKind::kNonNormalizable, "flow is identically zero");
    }
    for (double& v : flow) v /= peak;
  }
  sig.flow = std::move(flow);
  sig.normalized = normalize;
  sig.flow_deriv.resize(sig.flow.size());
  for (std::size_t n = 0; n < sig.flow.size(); ++n) {
    sig.flow_deriv[n] =
        n == 0 ? 0.0 : (sig.flow[n] - sig.flow[n - 1]) * sample_rate;
  }
  return sig;
}

std::vector<double> Autocorrelation(std::span<const double> frame,
                                    std::size_t max_lag) {
  if (max_lag >= frame.size()) {
    throw Error(ErrorKind::kLagTooLarge,
                "max_lag " + std::to_string(max_lag) + " for frame of " +
                    std::to_string(frame.size()));
  }
  std::vector<double> r(max_lag + 1, 0.0);
  for (std::size_t k = 0; k <= max_lag; ++k) {
    double acc = 0.0;
    for (std::size_t n = 0; n + k < frame.size(); ++n) {
      acc += frame[n] * frame[n + k];
    }
    r[k] = acc;
  }
  return r;
}

LpcModel LevinsonDurbin(std::span<const double> r, int order) {
  if (order < 1 || static_cast<std::size_t>(order) >= r.size()) {
    throw Error(ErrorKind::kInvalidArgument,
                "order must satisfy 1 <= order < len(r)");
  }
  if (!(r[0] > 0.0)) {
    throw Error(ErrorKind::kSingularAutocorrelation, "r[0] is not positive");
  }
  LpcModel m;
  m.coeffs.assign(static_cast<std::size_t>(order), 0.0);
  m.reflection.assign(static_cast<std::size_t>(order), 0.0);
  std::vector<double> prev(static_cast<std::size_t>(order), 0.0);
  double err = r[0];
  for (int i = 0; i < order; ++i) {
    double acc = r[static_cast<std::size_t>(i) + 1];
    for (int j = 0; j < i; ++j) {
      acc -= m.coeffs[static_cast<std::size_t>(j)] *
             r[static_cast<std::size_t>(i - j)];
    }
    const double k = acc / err;
    prev = m.coeffs;
    m.coeffs[static_cast<std::size_t>(i)] = k;
    for (int j = 0; j < i; ++j) {
      m.coeffs[static_cast<std::size_t>(j)] =
          prev[static_cast<std::size_t>(j)] -
          k * prev[static_cast<std::size_t>(i - 1 - j)];
    }
    m.reflection[static_cast<std::size_t>(i)] = k;
    err *= (1.0 - k * k);
    if (!(err > 0.0)) {
      throw Error(ErrorKind::kSingularAutocorrelation,
                  "prediction error vanished at order " + std::to_string(i + 1));
    }
  }
  m.gain = std::sqrt(err);
  return m;
}

LpcModel LpcAnalysis(std::span<const double> frame, int order) {
  const std::size_t n = frame.size();
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double hann =
        n > 1 ? 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi *
                                     static_cast<double>(i) /
                                     static_cast<double>(n - 1))
              : 1.0;
    w[i] = frame[i] * hann;
  }
  return LevinsonDurbin(Autocorrelation(w, static_cast<std::size_t>(order)),
                        order);
}

std::vector<double> InverseFilter(std::span<const double> frame,
                                  const LpcModel& model) {
  std::vector<double> e(frame.size());
  const std::size_t p = model.coeffs.size();
  for (std::size_t n = 0; n < frame.size(); ++n) {
    double pred = 0.0;
    for (std::size_t k = 1; k <= p && k <= n; ++k) {
      pred += model.coeffs[k - 1] * frame[n - k];
    }
    e[n] = frame[n] - pred;
  }
  return e;
}

std::vector<double> AllPoleFilter(std::span<const double> excitation,
                                  const LpcModel& model) {
  std::vector<double> x(excitation.size());
  const std::size_t p = model.coeffs.size();
  for (std::size_t n = 0; n < excitation.size(); ++n) {
    double acc = excitation[n];
    for (std::size_t k = 1; k <= p && k <= n; ++k) {
      acc += model.coeffs[k - 1] * x[n - k];
    }
    x[n] = acc;
  }
  return x;
}

std::vector<std::complex<double>> LpcPoles(const LpcModel& model) {
  const int p = model.order();
  std::vector<std::complex<double>> poles;
  if (p == 0) return poles;
  // Companion matrix of z^p - a_1 z^(p-1) - ... - a_p.
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(p, p);
  for (int j = 0; j < p; ++j) c(0, j) = model.coeffs[static_cast<std::size_t>(j)];
  for (int i = 1; i < p; ++i) c(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(c, false);
  const auto ev = es.eigenvalues();
  for (int i = 0; i < p; ++i) poles.push_back(ev(i));
  return poles;
}

std::vector<double> PoleFrequencies(const LpcModel& model, double sample_rate,
                                    double max_bandwidth_hz) {
  std::vector<double> freqs;
  for (const auto& z : LpcPoles(model)) {
    if (z.imag() <= 0.0) continue;
    const double f = std::arg(z) * sample_rate / (2.0 * std::numbers::pi);
    const double bw = -std::log(std::abs(z)) * sample_rate / std::numbers::pi;
    if (bw <= max_bandwidth_hz) freqs.push_back(f);
  }
  std::sort(freqs.begin(), freqs.end());
  return freqs;
}

int DefaultTractOrder(double sample_rate) {
  return 2 + static_cast<int>(std::lround(sample_rate / 1000.0));
}

GlottalFlowSignal Iaif(std::span<const double> frame, double sample_rate,
                       const IaifConfig& cfg) {
  const double min_len = 3.0 * sample_rate / cfg.min_f0;
  if (static_cast<double>(frame.size()) < min_len) {
    throw Error(ErrorKind::kFrameTooShort,
                std::to_string(frame.size()) + " samples, need " +
                    std::to_string(static_cast<long>(std::ceil(min_len))));
  }
  bool silent = true;
  for (double v : frame) {
    if (v != 0.0) {
      silent = false;
      break;
    }
  }
  if (silent) {
    throw Error(ErrorKind::kNonNormalizable, "silent frame has no glottal flow");
  }
  const int p = cfg.tract_order > 0 ? cfg.tract_order
                                    : DefaultTractOrder(sample_rate);

  const LpcModel tilt = LpcAnalysis(frame, 1);
  const std::vector<double> detilted = InverseFilter(frame, tilt);
  const LpcModel tract = LpcAnalysis(detilted, p);
  std::vector<double> residual = InverseFilter(frame, tract);
  const std::size_t warm = std::min<std::size_t>(residual.size(),
                                                 static_cast<std::size_t>(p));
  std::fill(residual.begin(), residual.begin() + static_cast<long>(warm), 0.0);

  std::vector<double> flow(residual.size());
  double state = 0.0;
  for (std::size_t n = 0; n < residual.size(); ++n) {
    state = residual[n] + cfg.leak * state;
    flow[n] = state;
  }
  return MakeFlowSignal(std::move(flow), sample_rate, cfg.normalize);
}

}  // namespace glottkit
