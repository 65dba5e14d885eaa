// glottkit/abcde.h

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

#ifndef GLOTTKIT_ABCDE_H_
#define GLOTTKIT_ABCDE_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "glottkit/audio.h"
#include "glottkit/proxy_classifier.h"
#include "glottkit/spectral.h"

namespace glottkit {

// Fully connected net: tanh on hidden layers, identity on the output.
struct DenseNet {
  std::vector<int> sizes;                // input, hidden..., output
  std::vector<Eigen::MatrixXd> weights;  // layer l: sizes[l+1] x sizes[l]
  std::vector<Eigen::VectorXd> biases;

  int input_dim() const { return sizes.empty() ? 0 : sizes.front(); }
  int output_dim() const { return sizes.empty() ? 0 : sizes.back(); }
  std::size_t num_layers() const { return weights.size(); }
  // Columns of `x` are examples.
  Eigen::MatrixXd Forward(const Eigen::MatrixXd& x) const;
};

// Zero weights and biases.
DenseNet MakeDenseNet(const std::vector<int>& sizes);

// How a representation stack is cut into encoder inputs.
struct StackWindowConfig {
  std::vector<StftResolution> resolutions = DefaultStackResolutions();
  int window_frames = 8;
  int window_hop = 8;
  int bands = 32;           // magnitude bins are averaged into this many bands
  double log_floor = 1e-6;  // log(band + floor)

  int input_dim() const {
    return window_frames * bands * static_cast<int>(resolutions.size());
  }
};

struct LatentCode {
  std::vector<double> z;
  std::size_t window_index = 0;  // position in the source stack
};

struct AbcdeModel {
  DenseNet encoder;
  DenseNet decoder;
  LinearClassifier head;  // over z, identity standardization
  double lambda_recon = 1.0;
  double lambda_disc = 1.0;
  std::vector<double> input_mean;  // per-dimension
  double input_scale = 1.0;        // shared
  StackWindowConfig windows;

  int input_dim() const { return encoder.input_dim(); }
  int latent_dim() const { return encoder.output_dim(); }
};

// Encoder input -> hidden... -> latent, decoder mirrored, all weights zero.
AbcdeModel MakeAbcdeModel(int input_dim, const std::vector<int>& hidden = {256, 64},
                          int latent_dim = 16);

// Uniform(-range, range) weights, zero biases, in a fixed layer order.
void InitializeWeights(AbcdeModel& m, std::uint64_t seed, double range = 0.1);

LatentCode Encode(const AbcdeModel& m, std::span<const double> x);
std::vector<double> Decode(const AbcdeModel& m, const LatentCode& z);

struct AbcdeExample {
  std::vector<double> x;
  int label = 0;
};

struct CompositeLossValue {
  double total = 0.0;
  double recon = 0.0;  // mean squared L2 reconstruction error, standardized
  double disc = 0.0;   // mean cross-entropy of the head, floored at 1e-7
};

CompositeLossValue CompositeLoss(const AbcdeModel& m,
                                 const std::vector<AbcdeExample>& batch);

// Parameters in the order encoder (W, b per layer), decoder, head (w, b).
std::vector<double> FlatParameters(const AbcdeModel& m);
void SetFlatParameters(AbcdeModel& m, std::span<const double> flat);
// Gradient of CompositeLoss(...).total in FlatParameters order.
std::vector<double> CompositeGradient(const AbcdeModel& m,
                                      const std::vector<AbcdeExample>& batch);

struct AbcdeTrainConfig {
  int epochs = 500;
  double lr = 0.01;
  std::uint64_t seed = 42;
  double init_range = 0.1;
};

struct AbcdeTrainResult {
  AbcdeModel model;
  std::vector<double> history;  // total loss before training, then per epoch
};

// Full-batch gradient descent from a seeded initialization. A step that
// raises the loss is rejected and the rate halved. Standardization constants
// are fitted to the dataset first. Throws kSingleClassData when
// lambda_disc > 0 and only one label is present.
AbcdeTrainResult TrainAbcde(const AbcdeModel& arch,
                            const std::vector<AbcdeExample>& dataset,
                            const AbcdeTrainConfig& cfg = {});

// Band-pooled log magnitudes over consecutive frame windows of every layer.
std::vector<std::vector<double>> StackWindows(const RepresentationStack& stack,
                                              const StackWindowConfig& cfg);
std::vector<std::vector<double>> AudioWindows(const AudioBuffer& buf,
                                              const StackWindowConfig& cfg);

// One latent code per stack window. Throws kNoFrames when the audio cannot
// fill a single window.
std::vector<LatentCode> LatentFeatures(const AbcdeModel& m, const AudioBuffer& buf);

inline constexpr const char* kAbcdeVersion = "abcde-v1";
std::string AbcdeToJson(const AbcdeModel& m);
AbcdeModel AbcdeFromJson(const std::string& text);
void SaveAbcde(const AbcdeModel& m, const std::filesystem::path& path);
AbcdeModel LoadAbcde(const std::filesystem::path& path);

}  // namespace glottkit

#endif  // GLOTTKIT_ABCDE_H_
