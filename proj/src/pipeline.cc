// glottkit/pipeline.cc

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

#include "glottkit/pipeline.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "glottkit/error.h"
#include "glottkit/phase_features.h"
#include "glottkit/pitch.h"

namespace glottkit {

namespace {

enum class Kind { kNumber, kInteger, kString, kOptionalNumber };

struct KeySpec {
  const char* key;
  Kind kind;
  nlohmann::json value;
  double lo;
  double hi;
};

const std::vector<KeySpec>& Specs() {
  static const std::vector<KeySpec> specs = {
      {"audio.sample_rate", Kind::kInteger, 16000, 8000, 192000},
      {"iaif.tract_order", Kind::kInteger, 0, 0, 64},
      {"iaif.leak", Kind::kNumber, 0.99, 0.0, 0.9999},
      {"iaif.min_f0", Kind::kNumber, 60.0, 20.0, 500.0},
      {"iaif.segment_sec", Kind::kNumber, 0.1, 0.02, 10.0},
      {"pitch.fmin", Kind::kNumber, 60.0, 20.0, 1000.0},
      {"pitch.fmax", Kind::kNumber, 400.0, 40.0, 2000.0},
      {"pitch.frame_sec", Kind::kNumber, 0.025, 0.005, 0.2},
      {"pitch.hop_sec", Kind::kNumber, 0.010, 0.001, 0.2},
      {"tremor.band_lo_hz", Kind::kNumber, 0.5, 0.0, 50.0},
      {"tremor.band_split_hz", Kind::kNumber, 4.0, 0.0, 50.0},
      {"tremor.band_hi_hz", Kind::kNumber, 12.0, 0.0, 50.0},
      {"tremor.min_voiced_fraction", Kind::kNumber, 0.5, 0.0, 1.0},
      {"adles.dt", Kind::kNumber, 0.02, 1e-4, kOneMassMaxDt},
      {"adles.warmup", Kind::kNumber, 60.0, 1.0, 1000.0},
      {"adles.phase_grid", Kind::kInteger, 64, 1, 4096},
      {"adles.observation", Kind::kString, "inverse_filtered", 0, 0},
      {"adles.max_iter", Kind::kInteger, 500, 0, 100000},
      {"adles.grad_tol", Kind::kNumber, 1e-9, 0.0, 1.0},
      {"adles.init_alpha", Kind::kNumber, 0.5, 0.0, 2.0},
      {"adles.init_beta", Kind::kNumber, 0.25, 1e-3, 2.0},
      {"adles.init_delta", Kind::kNumber, 0.0, -1.0, 1.0},
      {"features.sim_time", Kind::kNumber, 300.0, 20.0, 10000.0},
      {"features.tail_fraction", Kind::kNumber, 0.5, 0.01, 1.0},
      {"proxy.model", Kind::kString, "", 0, 0},
      {"proxy.frame_sec", Kind::kNumber, 0.025, 0.005, 0.2},
      {"proxy.hop_sec", Kind::kNumber, 0.010, 0.001, 0.2},
      {"proxy.n_mel", Kind::kInteger, 26, 2, 128},
      {"proxy.n_cep", Kind::kInteger, 13, 1, 128},
      {"proxy.l2_lambda", Kind::kNumber, 1e-3, 0.0, 1e3},
      {"proxy.max_iter", Kind::kInteger, 5000, 1, 1000000},
      {"proxy.lr", Kind::kNumber, 0.5, 1e-6, 100.0},
      {"abcde.model", Kind::kString, "", 0, 0},
      {"abcde.hidden", Kind::kString, "256,64", 0, 0},
      {"abcde.latent", Kind::kInteger, 16, 1, 1024},
      {"abcde.epochs", Kind::kInteger, 500, 0, 1000000},
      {"abcde.lr", Kind::kNumber, 0.01, 1e-9, 10.0},
      {"abcde.lambda_recon", Kind::kNumber, 1.0, 0.0, 1e6},
      {"abcde.lambda_disc", Kind::kNumber, 1.0, 0.0, 1e6},
      {"abcde.window_frames", Kind::kInteger, 8, 1, 1024},
      {"abcde.window_hop", Kind::kInteger, 8, 1, 1024},
      {"abcde.bands", Kind::kInteger, 32, 1, 4096},
      {"stack.resolutions", Kind::kString, "128/80/512,256/80/512,512/80/512", 0, 0},
      {"synth.alpha", Kind::kNumber, 0.6, 0.0, 2.0},
      {"synth.beta", Kind::kNumber, 0.32, 1e-3, 2.0},
      {"synth.delta", Kind::kNumber, 0.0, -1.0, 1.0},
      {"synth.f0", Kind::kNumber, 120.0, 40.0, 1000.0},
      {"synth.duration", Kind::kNumber, 1.0, 0.01, 600.0},
      {"synth.snr_db", Kind::kOptionalNumber, nullptr, -20.0, 200.0},
      {"synth.mod_rate", Kind::kNumber, 0.0, 0.0, 100.0},
      {"synth.mod_depth", Kind::kNumber, 0.0, 0.0, 500.0},
      {"synth.encoding", Kind::kString, "pcm16", 0, 0},
      {"eval.folds", Kind::kInteger, 5, 2, 1000},
      {"eval.label_column", Kind::kString, "label", 0, 0},
      {"seed", Kind::kInteger, static_cast<std::int64_t>(kDefaultSeed), 0, 9.0e15},
  };
  return specs;
}

const KeySpec* FindSpec(const std::string& key) {
  for (const auto& s : Specs()) {
    if (key == s.key) return &s;
  }
  return nullptr;
}

std::vector<std::string> Split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  return out;
}

std::vector<StftResolution> ParseResolutions(const std::string& s) {
  std::vector<StftResolution> out;
  for (const auto& part : Split(s, ',')) {
    const auto f = Split(part, '/');
    if (f.size() != 3) throw Error(ErrorKind::kBadConfig, "stack.resolutions entry: " + part);
    try {
      out.push_back({std::stoul(f[0]), std::stoul(f[1]), std::stoul(f[2])});
    } catch (const std::exception&) {
      throw Error(ErrorKind::kBadConfig, "stack.resolutions entry: " + part);
    }
  }
  if (out.empty()) throw Error(ErrorKind::kBadConfig, "stack.resolutions is empty");
  return out;
}

std::vector<int> ParseHidden(const std::string& s) {
  std::vector<int> out;
  for (const auto& part : Split(s, ',')) {
    if (part.empty()) continue;
    try {
      out.push_back(std::stoi(part));
    } catch (const std::exception&) {
      throw Error(ErrorKind::kBadConfig, "abcde.hidden entry: " + part);
    }
    if (out.back() <= 0) throw Error(ErrorKind::kBadConfig, "abcde.hidden must be positive");
  }
  return out;
}

}  // namespace

PipelineConfig::PipelineConfig() {
  for (const auto& s : Specs()) values_[s.key] = s.value;
  values_["seed"] = static_cast<std::int64_t>(SeedFromEnvironment());
}

PipelineConfig PipelineConfig::FromJsonFile(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::kBadConfig, "cannot read config " + path.string());
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kBadConfig, std::string("config JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::kBadConfig, "config must be a JSON object");
  PipelineConfig cfg;
  for (auto it = j.begin(); it != j.end(); ++it) cfg.Set(it.key(), it.value());
  return cfg;
}

void PipelineConfig::Set(const std::string& key, const nlohmann::json& value) {
  const KeySpec* spec = FindSpec(key);
  if (!spec) throw Error(ErrorKind::kBadConfig, "unknown config key " + key);
  switch (spec->kind) {
    case Kind::kNumber:
      if (!value.is_number()) throw Error(ErrorKind::kBadConfig, key + " must be a number");
      break;
    case Kind::kInteger:
      if (!value.is_number_integer() &&
          !(value.is_number() && std::floor(value.get<double>()) == value.get<double>())) {
        throw Error(ErrorKind::kBadConfig, key + " must be an integer");
      }
      values_[key] = static_cast<std::int64_t>(value.get<double>());
      return;
    case Kind::kString:
      if (!value.is_string()) {
        values_[key] = value.dump();
        return;
      }
      break;
    case Kind::kOptionalNumber:
      if (!value.is_null() && !value.is_number()) {
        throw Error(ErrorKind::kBadConfig, key + " must be a number or null");
      }
      break;
  }
  values_[key] = value;
}

void PipelineConfig::Set(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw Error(ErrorKind::kBadConfig, "expected key=value, got " + assignment);
  }
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  nlohmann::json value = nlohmann::json::parse(raw, nullptr, false);
  const KeySpec* spec = FindSpec(key);
  if (value.is_discarded() || (spec && spec->kind == Kind::kString && !value.is_string())) {
    value = raw;
  }
  Set(key, value);
}

void PipelineConfig::Validate() const {
  for (const auto& s : Specs()) {
    const auto& v = values_.at(s.key);
    if (s.kind == Kind::kString) continue;
    if (v.is_null()) continue;
    const double x = v.get<double>();
    if (!std::isfinite(x) || x < s.lo || x > s.hi) {
      std::ostringstream os;
      os << s.key << " = " << v.dump() << " outside [" << s.lo << ", " << s.hi << "]";
      throw Error(ErrorKind::kBadConfig, os.str());
    }
  }
  if (!(Num("pitch.fmin") < Num("pitch.fmax"))) {
    throw Error(ErrorKind::kBadConfig, "pitch.fmin must be below pitch.fmax");
  }
  if (!(Num("tremor.band_lo_hz") < Num("tremor.band_split_hz") &&
        Num("tremor.band_split_hz") < Num("tremor.band_hi_hz"))) {
    throw Error(ErrorKind::kBadConfig, "tremor bands must ascend");
  }
  if (Int("proxy.n_cep") > Int("proxy.n_mel")) {
    throw Error(ErrorKind::kBadConfig, "proxy.n_cep must not exceed proxy.n_mel");
  }
  const std::string obs = Str("adles.observation");
  if (obs != "flow" && obs != "inverse_filtered") {
    throw Error(ErrorKind::kBadConfig, "adles.observation must be flow or inverse_filtered");
  }
  const std::string enc = Str("synth.encoding");
  if (enc != "pcm16" && enc != "float32") {
    throw Error(ErrorKind::kBadConfig, "synth.encoding must be pcm16 or float32");
  }
  ParseResolutions(Str("stack.resolutions"));
  ParseHidden(Str("abcde.hidden"));
}

const nlohmann::json& PipelineConfig::Get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw Error(ErrorKind::kBadConfig, "unknown config key " + key);
  return it->second;
}

double PipelineConfig::Num(const std::string& key) const { return Get(key).get<double>(); }
int PipelineConfig::Int(const std::string& key) const {
  return static_cast<int>(Get(key).get<std::int64_t>());
}
std::string PipelineConfig::Str(const std::string& key) const {
  return Get(key).get<std::string>();
}

nlohmann::json PipelineConfig::ToJson() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : values_) j[k] = v;
  return j;
}

std::string PipelineConfig::Canonical() const { return ToJson().dump(); }

std::string PipelineConfig::Hash() const {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : Canonical()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

SimConfig PipelineConfig::Sim() const {
  SimConfig s;
  s.dt = Num("adles.dt");
  s.warmup = Num("adles.warmup");
  s.phase_grid = Int("adles.phase_grid");
  s.fmin = Num("pitch.fmin");
  s.fmax = Num("pitch.fmax");
  if (Str("adles.observation") == "inverse_filtered") {
    s.observation = Observation::kInverseFiltered;
    s.leak = Num("iaif.leak");
    const int order = Int("iaif.tract_order");
    s.zero_prefix = order > 0 ? order : DefaultTractOrder(Int("audio.sample_rate"));
  }
  return s;
}

OptConfig PipelineConfig::Opt() const {
  OptConfig o;
  o.sim = Sim();
  o.max_iter = Int("adles.max_iter");
  o.grad_tol = Num("adles.grad_tol");
  return o;
}

IaifConfig PipelineConfig::Iaif() const {
  IaifConfig c;
  c.tract_order = Int("iaif.tract_order");
  c.leak = Num("iaif.leak");
  c.min_f0 = Num("iaif.min_f0");
  return c;
}

PitchTrackConfig PipelineConfig::Pitch() const {
  PitchTrackConfig p;
  p.fmin = Num("pitch.fmin");
  p.fmax = Num("pitch.fmax");
  p.frame_sec = Num("pitch.frame_sec");
  p.hop_sec = Num("pitch.hop_sec");
  return p;
}

TremorConfig PipelineConfig::Tremor() const {
  TremorConfig t;
  t.pitch = Pitch();
  t.band_lo_hz = Num("tremor.band_lo_hz");
  t.band_split_hz = Num("tremor.band_split_hz");
  t.band_hi_hz = Num("tremor.band_hi_hz");
  t.min_voiced_fraction = Num("tremor.min_voiced_fraction");
  return t;
}

FrameFeatureConfig PipelineConfig::ProxyFrames() const {
  FrameFeatureConfig f;
  f.frame_sec = Num("proxy.frame_sec");
  f.hop_sec = Num("proxy.hop_sec");
  f.cepstral.n_mel = Int("proxy.n_mel");
  f.cepstral.n_cep = Int("proxy.n_cep");
  return f;
}

LogisticConfig PipelineConfig::Logistic() const {
  LogisticConfig l;
  l.l2_lambda = Num("proxy.l2_lambda");
  l.max_iter = Int("proxy.max_iter");
  l.lr = Num("proxy.lr");
  return l;
}

StackWindowConfig PipelineConfig::Windows() const {
  StackWindowConfig w;
  w.resolutions = ParseResolutions(Str("stack.resolutions"));
  w.window_frames = Int("abcde.window_frames");
  w.window_hop = Int("abcde.window_hop");
  w.bands = Int("abcde.bands");
  return w;
}

std::vector<int> PipelineConfig::AbcdeHidden() const { return ParseHidden(Str("abcde.hidden")); }

AbcdeTrainConfig PipelineConfig::AbcdeTrain() const {
  AbcdeTrainConfig t;
  t.epochs = Int("abcde.epochs");
  t.lr = Num("abcde.lr");
  t.seed = Seed();
  return t;
}

OneMassParams PipelineConfig::InitParams() const {
  OneMassParams p;
  p.alpha = Num("adles.init_alpha");
  p.beta = Num("adles.init_beta");
  p.delta = Num("adles.init_delta");
  return p;
}

OneMassParams PipelineConfig::SynthParams() const {
  OneMassParams p;
  p.alpha = Num("synth.alpha");
  p.beta = Num("synth.beta");
  p.delta = Num("synth.delta");
  return p;
}

SynthConfig PipelineConfig::Synth() const {
  SynthConfig s;
  s.f0_hz = Num("synth.f0");
  s.duration_sec = Num("synth.duration");
  s.sample_rate = Int("audio.sample_rate");
  if (!Get("synth.snr_db").is_null()) s.snr_db = Num("synth.snr_db");
  if (Num("synth.mod_rate") > 0.0 && Num("synth.mod_depth") > 0.0) {
    s.modulation = Modulation{Num("synth.mod_rate"), Num("synth.mod_depth")};
  }
  s.seed = Seed();
  return s;
}

std::uint64_t PipelineConfig::Seed() const {
  return static_cast<std::uint64_t>(Get("seed").get<std::int64_t>());
}

std::uint64_t SeedFromEnvironment(std::uint64_t fallback) {
  const char* env = std::getenv("GLOTTKIT_SEED");
  if (!env || !*env) return fallback;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  return (end && *end == '\0') ? static_cast<std::uint64_t>(v) : fallback;
}

void FeatureRecord::Set(const std::string& name, std::optional<double> value) {
  if (value && !std::isfinite(*value)) value.reset();
  for (auto& [k, v] : features) {
    if (k == name) {
      v = value;
      return;
    }
  }
  features.emplace_back(name, value);
}

std::optional<double> FeatureRecord::Get(const std::string& name) const {
  for (const auto& [k, v] : features) {
    if (k == name) return v;
  }
  return std::nullopt;
}

AudioBuffer LoadCanonical(const std::filesystem::path& path, int rate) {
  AudioBuffer buf = ReadWav(path);
  if (buf.sample_rate != rate) buf = Resample(buf, rate);
  return buf;
}

void RequireVoiced(const AudioBuffer& buf, const PipelineConfig& cfg) {
  const F0Contour c = TrackF0(buf, cfg.Pitch());
  if (c.voiced.empty() || c.voiced_fraction() < cfg.Num("tremor.min_voiced_fraction")) {
    throw Error(ErrorKind::kUnvoicedTarget, "too few voiced frames for a fit");
  }
}

TrajectorySet FeatureTrajectory(const OneMassParams& p, const PipelineConfig& cfg) {
  const double dt = cfg.Num("adles.dt");
  const auto warm = static_cast<std::size_t>(cfg.Num("adles.warmup") / dt);
  const auto keep = static_cast<std::size_t>(cfg.Num("features.sim_time") / dt);
  const TrajectorySet full = SimulateOneMass(p, dt, warm + keep);
  TrajectorySet tail;
  tail.dt = dt;
  tail.states = full.states.bottomRows(static_cast<Eigen::Index>(keep + 1));
  tail.times.assign(full.times.end() - static_cast<long>(keep + 1), full.times.end());
  return tail;
}

EstimateOutput EstimateFromAudio(const AudioBuffer& buf, const PipelineConfig& cfg) {
  RequireVoiced(buf, cfg);
  const OptConfig opt = cfg.Opt();
  const GlottalFlowSignal target =
      FlowTargetFromAudio(buf, cfg.Num("iaif.segment_sec"), cfg.Iaif());
  EstimateOutput out;
  out.fit = EstimateParams(target, cfg.InitParams(), opt);
  out.trajectory = FeatureTrajectory(out.fit.params, cfg);
  return out;
}

namespace {

std::optional<double> Try(const std::function<double()>& fn) {
  try {
    return fn();
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

FeatureRecord ExtractFeatures(const AudioBuffer& buf, const std::string& source,
                              const PipelineConfig& cfg, const LinearClassifier* proxy,
                              const AbcdeModel* abcde) {
  FeatureRecord rec;
  rec.source = source;
  rec.config_hash = cfg.Hash();
  const EstimateOutput est = EstimateFromAudio(buf, cfg);
  const FitResult& fit = est.fit;
  rec.Set("alpha", fit.params.alpha);
  rec.Set("beta", fit.params.beta);
  rec.Set("delta", fit.params.delta);
  rec.Set("fit_loss", fit.loss_curve.empty() ? std::nullopt
                                             : std::optional<double>(fit.loss_curve.back()));
  const Portrait left = PhasePortrait(est.trajectory, Fold::kLeft);
  const Portrait right = PhasePortrait(est.trajectory, Fold::kRight);
  const double tail = cfg.Num("features.tail_fraction");
  rec.Set("limit_cycle_area_l", Try([&] { return LimitCycleArea(left, tail); }));
  rec.Set("limit_cycle_area_r", Try([&] { return LimitCycleArea(right, tail); }));
  rec.Set("asymmetry_index", AsymmetryIndex(est.trajectory));
  rec.Set("cycle_variability", Try([&] { return CycleVariability(left); }));
  rec.Set("tremor_index", Try([&] { return TremorIndex(buf, cfg.Tremor()); }));

  const F0Contour c = TrackF0(buf, cfg.Pitch());
  double mean = 0.0, sq = 0.0;
  std::size_t nv = 0;
  for (std::size_t i = 0; i < c.f0.size(); ++i) {
    if (!c.voiced[i]) continue;
    mean += c.f0[i];
    sq += c.f0[i] * c.f0[i];
    ++nv;
  }
  if (nv > 0) {
    mean /= static_cast<double>(nv);
    rec.Set("f0_mean", mean);
    rec.Set("f0_std", std::sqrt(std::max(0.0, sq / static_cast<double>(nv) - mean * mean)));
  } else {
    rec.Set("f0_mean", std::nullopt);
    rec.Set("f0_std", std::nullopt);
  }

  if (proxy) {
    const ScoreSummary s = ScoreRecording(*proxy, buf, cfg.ProxyFrames());
    rec.Set("proxy_mean", s.mean);
    rec.Set("proxy_std", s.std);
    rec.Set("proxy_frac", s.fraction_above_half);
  }
  if (abcde) {
    const auto codes = LatentFeatures(*abcde, buf);
    const auto d = static_cast<std::size_t>(abcde->latent_dim());
    std::vector<double> m(d, 0.0);
    for (const auto& code : codes) {
      for (std::size_t j = 0; j < d; ++j) m[j] += code.z[j];
    }
    for (std::size_t j = 0; j < d; ++j) {
      rec.Set("latent_" + std::to_string(j), m[j] / static_cast<double>(codes.size()));
    }
  }
  return rec;
}

namespace {

std::string FormatNumber(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string CsvCell(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return s;
}

std::vector<std::string> ColumnNames(const std::vector<FeatureRecord>& rows) {
  std::vector<std::string> names;
  for (const auto& r : rows) {
    for (const auto& [k, v] : r.features) {
      if (std::find(names.begin(), names.end(), k) == names.end()) names.push_back(k);
    }
  }
  return names;
}

}  // namespace

void WriteFeatureCsv(const std::vector<FeatureRecord>& rows, std::ostream& out) {
  const auto names = ColumnNames(rows);
  out << "source";
  for (const auto& n : names) out << "," << n;
  out << ",error\n";
  for (const auto& r : rows) {
    out << CsvCell(r.source);
    for (const auto& n : names) {
      const auto v = r.Get(n);
      out << "," << (v ? FormatNumber(*v) : "NA");
    }
    out << "," << CsvCell(r.error) << "\n";
  }
}

void WriteFeatureJson(const std::vector<FeatureRecord>& rows, const PipelineConfig& cfg,
                      std::ostream& out) {
  nlohmann::json j;
  j["config_hash"] = cfg.Hash();
  j["version"] = kGlottkitVersion;
  j["records"] = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json rec;
    rec["source"] = r.source;
    nlohmann::json f = nlohmann::json::object();
    for (const auto& [k, v] : r.features) f[k] = v ? nlohmann::json(*v) : nlohmann::json();
    rec["features"] = f;
    rec["error"] = r.error.empty() ? nlohmann::json() : nlohmann::json(r.error);
    rec["config_hash"] = r.config_hash;
    j["records"].push_back(rec);
  }
  out << j.dump(2) << "\n";
}

FeatureTable ReadFeatureCsv(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::kMissingFile, path.string());
  std::string line;
  if (!std::getline(f, line)) throw Error(ErrorKind::kCorruptHeader, "empty feature table");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = Split(line, ',');
  if (header.size() < 2 || header.front() != "source" || header.back() != "error") {
    throw Error(ErrorKind::kCorruptHeader, "feature table header must be source,...,error");
  }
  FeatureTable t;
  t.names.assign(header.begin() + 1, header.end() - 1);
  while (std::getline(f, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = Split(line, ',');
    if (cells.size() == header.size() - 1) cells.emplace_back();
    if (cells.size() != header.size()) {
      throw Error(ErrorKind::kDimensionMismatch, "feature row width differs from header");
    }
    t.sources.push_back(cells.front());
    std::vector<std::optional<double>> vals;
    for (std::size_t i = 1; i + 1 < cells.size(); ++i) {
      if (cells[i] == "NA" || cells[i].empty()) {
        vals.emplace_back();
      } else {
        try {
          vals.emplace_back(std::stod(cells[i]));
        } catch (const std::exception&) {
          throw Error(ErrorKind::kCorruptHeader, "non-numeric cell " + cells[i]);
        }
      }
    }
    t.values.push_back(std::move(vals));
    t.errors.push_back(cells.back());
  }
  return t;
}

std::map<std::string, int> ReadSourceLabels(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::kMissingFile, path.string());
  std::map<std::string, int> out;
  std::string line;
  while (std::getline(f, line)) {
    std::istringstream is(line);
    std::string src;
    int label = 0;
    if (!(is >> src)) continue;
    if (!(is >> label) || (label != 0 && label != 1)) {
      throw Error(ErrorKind::kInvalidArgument, "bad label line: " + line);
    }
    out[src] = label;
  }
  return out;
}

std::optional<int> LookupLabel(const std::map<std::string, int>& labels,
                               const std::string& source) {
  if (auto it = labels.find(source); it != labels.end()) return it->second;
  const std::string base = std::filesystem::path(source).filename().string();
  if (auto it = labels.find(base); it != labels.end()) return it->second;
  return std::nullopt;
}

double Auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  double pos = 0, neg = 0, acc = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    pos += 1;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0) continue;
      acc += scores[i] > scores[j] ? 1.0 : (scores[i] == scores[j] ? 0.5 : 0.0);
    }
  }
  for (int l : labels) neg += l == 0;
  return (pos > 0 && neg > 0) ? acc / (pos * neg) : 0.5;
}

nlohmann::json EvalReport::ToJson() const {
  nlohmann::json j;
  j["accuracy_mean"] = accuracy_mean;
  j["accuracy_std"] = accuracy_std;
  j["fold_accuracy"] = fold_accuracy;
  j["rows"] = rows;
  j["features"] = used_features;
  nlohmann::json auc = nlohmann::json::object();
  for (const auto& [k, v] : feature_auc) auc[k] = v;
  j["feature_auc"] = auc;
  return j;
}

EvalReport EvaluateTable(const FeatureTable& table, const std::vector<int>& labels_in,
                         const EvalConfig& cfg) {
  if (cfg.folds < 2) throw Error(ErrorKind::kBadConfig, "folds must be >= 2");
  if (labels_in.size() != table.sources.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "label count differs from row count");
  }
  std::vector<std::size_t> cols;
  for (std::size_t j = 0; j < table.names.size(); ++j) {
    std::size_t present = 0, usable_rows = 0;
    for (std::size_t i = 0; i < table.values.size(); ++i) {
      if (!table.errors[i].empty() || labels_in[i] < 0) continue;
      ++usable_rows;
      present += table.values[i][j].has_value();
    }
    if (usable_rows > 0 && present == usable_rows) cols.push_back(j);
  }
  LabeledFrameTable data;
  for (std::size_t j : cols) data.feature_names.push_back(table.names[j]);
  std::vector<int> labels;
  for (std::size_t i = 0; i < table.values.size(); ++i) {
    if (!table.errors[i].empty() || labels_in[i] < 0) continue;
    std::vector<double> x;
    for (std::size_t j : cols) x.push_back(*table.values[i][j]);
    data.features.push_back(std::move(x));
    data.sources.push_back(table.sources[i]);
    labels.push_back(labels_in[i]);
  }
  std::mt19937_64 rng(cfg.seed);
  if (cfg.permute_labels) std::shuffle(labels.begin(), labels.end(), rng);
  data.labels = labels;
  const std::size_t n = data.num_rows();
  if (std::count(labels.begin(), labels.end(), 0) == 0 ||
      std::count(labels.begin(), labels.end(), 1) == 0) {
    throw Error(ErrorKind::kSingleClassData, "evaluation needs both labels");
  }
  if (data.dim() == 0) throw Error(ErrorKind::kNoFrames, "no complete feature columns");

  // Stratified fold assignment.
  std::vector<int> fold(n, 0);
  for (int cls = 0; cls < 2; ++cls) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < n; ++i) {
      if (labels[i] == cls) idx.push_back(i);
    }
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t k = 0; k < idx.size(); ++k) fold[idx[k]] = static_cast<int>(k % cfg.folds);
  }
  EvalReport rep;
  rep.rows = n;
  rep.used_features = data.feature_names;
  for (int k = 0; k < cfg.folds; ++k) {
    LabeledFrameTable train;
    train.feature_names = data.feature_names;
    std::vector<std::size_t> test;
    for (std::size_t i = 0; i < n; ++i) {
      if (fold[i] == k) {
        test.push_back(i);
      } else {
        train.features.push_back(data.features[i]);
        train.labels.push_back(labels[i]);
        train.sources.push_back(data.sources[i]);
      }
    }
    if (test.empty()) continue;
    const LinearClassifier m = TrainLogistic(train, cfg.logistic);
    std::size_t correct = 0;
    for (std::size_t i : test) {
      correct += (Score(m, data.features[i]) > 0.5 ? 1 : 0) == labels[i];
    }
    rep.fold_accuracy.push_back(static_cast<double>(correct) / static_cast<double>(test.size()));
  }
  const auto folds = static_cast<double>(rep.fold_accuracy.size());
  rep.accuracy_mean = std::accumulate(rep.fold_accuracy.begin(), rep.fold_accuracy.end(), 0.0) / folds;
  double var = 0.0;
  for (double a : rep.fold_accuracy) var += (a - rep.accuracy_mean) * (a - rep.accuracy_mean);
  rep.accuracy_std = std::sqrt(var / folds);
  for (std::size_t j = 0; j < data.dim(); ++j) {
    std::vector<double> col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = data.features[i][j];
    rep.feature_auc.emplace_back(data.feature_names[j], Auc(col, labels));
  }
  return rep;
}

void ParallelFor(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const auto workers = static_cast<std::size_t>(std::max(1, jobs));
  if (workers == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(workers, n); ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace glottkit
