// glottkit/pipeline.h

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

#ifndef GLOTTKIT_PIPELINE_H_
#define GLOTTKIT_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "glottkit/abcde.h"
#include "glottkit/adles.h"
#include "glottkit/audio.h"
#include "glottkit/pitch.h"
#include "glottkit/proxy_classifier.h"
#include "glottkit/synth.h"

namespace glottkit {

inline constexpr const char* kGlottkitVersion = "0.1.0";
inline constexpr std::uint64_t kDefaultSeed = 42;

// Flat dotted keys with typed defaults. Unknown keys and out-of-range values
// are rejected by Validate() with kBadConfig.
class PipelineConfig {
 public:
  PipelineConfig();

  static PipelineConfig FromJsonFile(const std::filesystem::path& path);
  // Applies one "key=value" override; the value is parsed as JSON when
  // possible and taken as a string otherwise.
  void Set(const std::string& assignment);
  void Set(const std::string& key, const nlohmann::json& value);
  void Validate() const;

  double Num(const std::string& key) const;
  int Int(const std::string& key) const;
  std::string Str(const std::string& key) const;
  bool Has(const std::string& key) const { return values_.count(key) > 0; }

  nlohmann::json ToJson() const;
  std::string Canonical() const;
  std::string Hash() const;  // 64-bit FNV-1a of Canonical(), hex

  SimConfig Sim() const;
  OptConfig Opt() const;
  IaifConfig Iaif() const;
  PitchTrackConfig Pitch() const;
  TremorConfig Tremor() const;
  FrameFeatureConfig ProxyFrames() const;
  LogisticConfig Logistic() const;
  StackWindowConfig Windows() const;
  std::vector<int> AbcdeHidden() const;
  AbcdeTrainConfig AbcdeTrain() const;
  OneMassParams InitParams() const;
  OneMassParams SynthParams() const;
  SynthConfig Synth() const;
  std::uint64_t Seed() const;

 private:
  const nlohmann::json& Get(const std::string& key) const;
  std::map<std::string, nlohmann::json> values_;
};

// Seed from GLOTTKIT_SEED when set and parseable, else the default.
std::uint64_t SeedFromEnvironment(std::uint64_t fallback = kDefaultSeed);

struct FeatureRecord {
  std::string source;
  std::vector<std::pair<std::string, std::optional<double>>> features;
  std::string error;  // non-empty for a failed file
  std::string config_hash;

  void Set(const std::string& name, std::optional<double> value);
  std::optional<double> Get(const std::string& name) const;
};

// Proxy features for one recording. Throws on failure.
FeatureRecord ExtractFeatures(const AudioBuffer& buf, const std::string& source,
                              const PipelineConfig& cfg,
                              const LinearClassifier* proxy = nullptr,
                              const AbcdeModel* abcde = nullptr);

// Reads a file and resamples it to the canonical rate.
AudioBuffer LoadCanonical(const std::filesystem::path& path,
                          int rate = kCanonicalSampleRate);

// Throws kUnvoicedTarget when fewer than min_voiced_fraction of frames carry
// an f0.
void RequireVoiced(const AudioBuffer& buf, const PipelineConfig& cfg);

struct EstimateOutput {
  FitResult fit;
  TrajectorySet trajectory;  // fitted model after warm-up
};
EstimateOutput EstimateFromAudio(const AudioBuffer& buf, const PipelineConfig& cfg);
TrajectorySet FeatureTrajectory(const OneMassParams& p, const PipelineConfig& cfg);

// Feature tables. Missing values are written as NA.
void WriteFeatureCsv(const std::vector<FeatureRecord>& rows, std::ostream& out);
void WriteFeatureJson(const std::vector<FeatureRecord>& rows, const PipelineConfig& cfg,
                      std::ostream& out);
struct FeatureTable {
  std::vector<std::string> names;
  std::vector<std::string> sources;
  std::vector<std::vector<std::optional<double>>> values;
  std::vector<std::string> errors;
};
FeatureTable ReadFeatureCsv(const std::filesystem::path& path);

// "source label" lines; sources match either the full string or its basename.
std::map<std::string, int> ReadSourceLabels(const std::filesystem::path& path);
std::optional<int> LookupLabel(const std::map<std::string, int>& labels,
                               const std::string& source);

struct EvalConfig {
  int folds = 5;
  std::uint64_t seed = kDefaultSeed;
  bool permute_labels = false;
  LogisticConfig logistic;
};

struct EvalReport {
  double accuracy_mean = 0.0;
  double accuracy_std = 0.0;
  std::vector<double> fold_accuracy;
  std::vector<std::pair<std::string, double>> feature_auc;
  std::size_t rows = 0;
  std::vector<std::string> used_features;
  nlohmann::json ToJson() const;
};

// Stratified, seeded k-fold cross-validated logistic regression plus
// univariate AUC per feature. Rows with an error or any missing used value
// are dropped; features missing everywhere are skipped. Throws
// kSingleClassData and kBadConfig (folds < 2).
EvalReport EvaluateTable(const FeatureTable& table, const std::vector<int>& labels,
                         const EvalConfig& cfg);

// Area under the ROC curve with ties counted half.
double Auc(const std::vector<double>& scores, const std::vector<int>& labels);

// Runs fn(i) for i in [0, n) on up to `jobs` threads.
void ParallelFor(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace glottkit

#endif  // GLOTTKIT_PIPELINE_H_
