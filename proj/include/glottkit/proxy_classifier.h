// glottkit/proxy_classifier.h

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

#ifndef GLOTTKIT_PROXY_CLASSIFIER_H_
#define GLOTTKIT_PROXY_CLASSIFIER_H_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "glottkit/audio.h"
#include "glottkit/spectral.h"

namespace glottkit {

struct LinearClassifier {
  std::vector<double> weights;
  double bias = 0.0;
  std::vector<double> mean;   // per-dimension standardization
  std::vector<double> scale;  // > 0

  std::size_t dim() const { return weights.size(); }
};

struct LabeledFrameTable {
  std::vector<std::string> feature_names;
  std::vector<std::vector<double>> features;
  std::vector<int> labels;  // 0 or 1
  std::vector<std::string> sources;

  std::size_t num_rows() const { return features.size(); }
  std::size_t dim() const { return feature_names.size(); }
  void AddRow(std::vector<double> x, int label, std::string source);
};

struct LogisticConfig {
  double l2_lambda = 1e-3;
  int max_iter = 5000;
  double lr = 0.5;
  double grad_tol = 1e-6;
};

// L2-regularized logistic regression, full-batch gradient descent from zero
// weights on standardized features. Throws kSingleClassData,
// kDimensionMismatch, or kInvalidArgument for fewer than two rows.
LinearClassifier TrainLogistic(const LabeledFrameTable& data,
                               const LogisticConfig& cfg = {});

double Sigmoid(double t);
double Projection(const LinearClassifier& m, std::span<const double> x);
// sigmoid(w . standardize(x) + b). Throws kDimensionMismatch.
double Score(const LinearClassifier& m, std::span<const double> x);
LinearClassifier Negated(const LinearClassifier& m);

struct FrameFeatureConfig {
  double frame_sec = 0.025;
  double hop_sec = 0.010;
  CepstralConfig cepstral;
};

// Cepstral features per frame (rows). Empty when the recording is shorter
// than one frame.
std::vector<std::vector<double>> RecordingFrameFeatures(
    const AudioBuffer& buf, const FrameFeatureConfig& cfg = {});

struct ScoreSummary {
  double mean = 0.0;
  double std = 0.0;
  double fraction_above_half = 0.0;
  std::size_t frames = 0;
};

// Throws kNoFrames when the recording is shorter than one frame.
ScoreSummary ScoreRecording(const LinearClassifier& m, const AudioBuffer& buf,
                            const FrameFeatureConfig& cfg = {});

// CSV with header f0..f{n-1},label,source.
void WriteTableCsv(const LabeledFrameTable& t, const std::filesystem::path& path);
LabeledFrameTable ReadTableCsv(const std::filesystem::path& path);

struct LabelInterval {
  double start_sec = 0.0;
  double end_sec = 0.0;
  int label = 0;
};

// Text lines "start_sec end_sec label", ascending and non-overlapping.
std::vector<LabelInterval> ReadLabelSidecar(const std::filesystem::path& path);

// Rows for frames whose centre falls inside a labelled interval.
void AppendLabeledFrames(LabeledFrameTable& t, const AudioBuffer& buf,
                         const std::vector<LabelInterval>& labels,
                         const std::string& source,
                         const FrameFeatureConfig& cfg = {});

// JSON round trip of the classifier.
std::string ClassifierToJson(const LinearClassifier& m);
LinearClassifier ClassifierFromJson(const std::string& text);

}  // namespace glottkit

#endif  // GLOTTKIT_PROXY_CLASSIFIER_H_
