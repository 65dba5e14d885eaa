// glottkit/proxy_classifier.cc

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

#include "glottkit/proxy_classifier.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "glottkit/error.h"

namespace glottkit {

void LabeledFrameTable::AddRow(std::vector<double> x, int label, std::string source) {
  if (feature_names.empty()) {
    for (std::size_t i = 0; i < x.size(); ++i) feature_names.push_back("f" + std::to_string(i));
  }
  if (x.size() != feature_names.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "row width differs from header");
  }
  features.push_back(std::move(x));
  labels.push_back(label);
  sources.push_back(std::move(source));
}

double Sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

namespace {

void CheckTable(const LabeledFrameTable& d) {
  if (d.num_rows() < 2) throw Error(ErrorKind::kInvalidArgument, "need >= 2 rows");
  if (d.labels.size() != d.num_rows()) {
    throw Error(ErrorKind::kDimensionMismatch, "label count differs from row count");
  }
  bool zero = false, one = false;
  for (std::size_t i = 0; i < d.num_rows(); ++i) {
    if (d.features[i].size() != d.dim()) {
      throw Error(ErrorKind::kDimensionMismatch, "inconsistent feature width");
    }
    if (d.labels[i] == 0) {
      zero = true;
    } else if (d.labels[i] == 1) {
      one = true;
    } else {
      throw Error(ErrorKind::kInvalidArgument, "labels must be 0 or 1");
    }
  }
  if (!(zero && one)) throw Error(ErrorKind::kSingleClassData, "both labels required");
}

}  // namespace

LinearClassifier TrainLogistic(const LabeledFrameTable& data, const LogisticConfig& cfg) {
  CheckTable(data);
  const std::size_t n = data.num_rows(), d = data.dim();
  LinearClassifier m;
  m.mean.assign(d, 0.0);
  m.scale.assign(d, 1.0);
  for (std::size_t j = 0; j < d; ++j) {
    double mu = 0.0;
    for (std::size_t i = 0; i < n; ++i) mu += data.features[i][j];
    mu /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double c = data.features[i][j] - mu;
      var += c * c;
    }
    const double sd = std::sqrt(var / static_cast<double>(n));
    m.mean[j] = mu;
    m.scale[j] = sd > 1e-12 * (1.0 + std::abs(mu)) ? sd : 1.0;
  }
  Eigen::MatrixXd X(n, d);
  Eigen::VectorXd y(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      X(i, j) = (data.features[i][j] - m.mean[j]) / m.scale[j];
    }
    y(i) = data.labels[i];
  }
  Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
  double b = 0.0;
  for (int it = 0; it < cfg.max_iter; ++it) {
    const Eigen::VectorXd t = (X * w).array() + b;
    Eigen::VectorXd r(n);
    for (std::size_t i = 0; i < n; ++i) r(i) = Sigmoid(t(i)) - y(i);
    const Eigen::VectorXd gw = X.transpose() * r / static_cast<double>(n) + cfg.l2_lambda * w;
    const double gb = r.sum() / static_cast<double>(n);
    if (std::sqrt(gw.squaredNorm() + gb * gb) < cfg.grad_tol) break;
    w -= cfg.lr * gw;
    b -= cfg.lr * gb;
  }
  m.weights.assign(w.data(), w.data() + d);
  m.bias = b;
  return m;
}

double Projection(const LinearClassifier& m, std::span<const double> x) {
  if (x.size() != m.dim() || m.mean.size() != m.dim() || m.scale.size() != m.dim()) {
    throw Error(ErrorKind::kDimensionMismatch, "feature width differs from model");
  }
  double t = m.bias;
  for (std::size_t j = 0; j < x.size(); ++j) {
    t += m.weights[j] * (x[j] - m.mean[j]) / m.scale[j];
  }
  return t;
}

double Score(const LinearClassifier& m, std::span<const double> x) {
  return Sigmoid(Projection(m, x));
}

LinearClassifier Negated(const LinearClassifier& m) {
  LinearClassifier n = m;
  for (double& w : n.weights) w = -w;
  n.bias = -m.bias;
  return n;
}

std::vector<std::vector<double>> RecordingFrameFeatures(const AudioBuffer& buf,
                                                        const FrameFeatureConfig& cfg) {
  const auto len = static_cast<std::size_t>(std::lround(cfg.frame_sec * buf.sample_rate));
  const auto hop = static_cast<std::size_t>(std::lround(cfg.hop_sec * buf.sample_rate));
  const FrameSet fs = Frame(buf, len, hop);
  std::vector<std::vector<double>> out;
  out.reserve(fs.num_frames());
  for (std::size_t i = 0; i < fs.num_frames(); ++i) {
    const auto row = std::span<const double>(fs.frames.data() + i * len, len);
    out.push_back(CepstralFeatures(row, buf.sample_rate, cfg.cepstral.n_mel,
                                   cfg.cepstral.n_cep, cfg.cepstral.log_floor));
  }
  return out;
}

ScoreSummary ScoreRecording(const LinearClassifier& m, const AudioBuffer& buf,
                            const FrameFeatureConfig& cfg) {
  const auto feats = RecordingFrameFeatures(buf, cfg);
  if (feats.empty()) throw Error(ErrorKind::kNoFrames, "recording shorter than one frame");
  std::vector<double> s;
  s.reserve(feats.size());
  for (const auto& f : feats) s.push_back(Score(m, f));
  ScoreSummary out;
  out.frames = s.size();
  for (double v : s) out.mean += v;
  out.mean /= static_cast<double>(s.size());
  double var = 0.0;
  std::size_t above = 0;
  for (double v : s) {
    var += (v - out.mean) * (v - out.mean);
    if (v > 0.5) ++above;
  }
  // Identical scores give exactly zero spread despite rounding in the mean.
  const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
  out.std = *lo == *hi ? 0.0 : std::sqrt(var / static_cast<double>(s.size()));
  out.fraction_above_half = static_cast<double>(above) / static_cast<double>(s.size());
  return out;
}

namespace {

std::string Num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

void WriteTableCsv(const LabeledFrameTable& t, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorKind::kIoError, "cannot open " + path.string());
  for (std::size_t j = 0; j < t.dim(); ++j) f << "f" << j << ",";
  f << "label,source\n";
  for (std::size_t i = 0; i < t.num_rows(); ++i) {
    for (double v : t.features[i]) f << Num(v) << ",";
    f << t.labels[i] << "," << t.sources[i] << "\n";
  }
  if (!f) throw Error(ErrorKind::kIoError, "write failed for " + path.string());
}

LabeledFrameTable ReadTableCsv(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::kMissingFile, path.string());
  std::string line;
  if (!std::getline(f, line)) throw Error(ErrorKind::kCorruptHeader, "empty table");
  const auto header = SplitCsv(line);
  if (header.size() < 2 || header[header.size() - 2] != "label" ||
      header.back() != "source") {
    throw Error(ErrorKind::kCorruptHeader, "table header must end with label,source");
  }
  LabeledFrameTable t;
  t.feature_names.assign(header.begin(), header.end() - 2);
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    const auto cells = SplitCsv(line);
    if (cells.size() != header.size()) {
      throw Error(ErrorKind::kDimensionMismatch, "row width differs from header");
    }
    std::vector<double> x;
    for (std::size_t j = 0; j + 2 < cells.size(); ++j) x.push_back(std::stod(cells[j]));
    t.features.push_back(std::move(x));
    t.labels.push_back(std::stoi(cells[cells.size() - 2]));
    t.sources.push_back(cells.back());
  }
  return t;
}

std::vector<LabelInterval> ReadLabelSidecar(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::kMissingFile, path.string());
  std::vector<LabelInterval> out;
  std::string line;
  while (std::getline(f, line)) {
    std::istringstream is(line);
    LabelInterval li;
    if (!(is >> li.start_sec)) continue;
    if (!(is >> li.end_sec >> li.label) || !(li.end_sec > li.start_sec) ||
        (li.label != 0 && li.label != 1)) {
      throw Error(ErrorKind::kInvalidArgument, "bad label line: " + line);
    }
    if (!out.empty() && li.start_sec < out.back().end_sec) {
      throw Error(ErrorKind::kInvalidArgument, "label intervals overlap or descend");
    }
    out.push_back(li);
  }
  return out;
}

void AppendLabeledFrames(LabeledFrameTable& t, const AudioBuffer& buf,
                         const std::vector<LabelInterval>& labels,
                         const std::string& source, const FrameFeatureConfig& cfg) {
  const auto feats = RecordingFrameFeatures(buf, cfg);
  for (std::size_t i = 0; i < feats.size(); ++i) {
    const double centre = static_cast<double>(i) * cfg.hop_sec + 0.5 * cfg.frame_sec;
    for (const auto& li : labels) {
      if (centre >= li.start_sec && centre < li.end_sec) {
        t.AddRow(feats[i], li.label, source);
        break;
      }
    }
  }
}

std::string ClassifierToJson(const LinearClassifier& m) {
  nlohmann::json j;
  j["weights"] = m.weights;
  j["bias"] = m.bias;
  j["mean"] = m.mean;
  j["scale"] = m.scale;
  return j.dump(1);
}

LinearClassifier ClassifierFromJson(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    LinearClassifier m;
    m.weights = j.at("weights").get<std::vector<double>>();
    m.bias = j.at("bias").get<double>();
    m.mean = j.at("mean").get<std::vector<double>>();
    m.scale = j.at("scale").get<std::vector<double>>();
    if (m.mean.size() != m.dim() || m.scale.size() != m.dim()) {
      throw Error(ErrorKind::kDimensionMismatch, "classifier arrays differ in length");
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kBadConfig, std::string("classifier JSON: ") + e.what());
  }
}

}  // namespace glottkit
