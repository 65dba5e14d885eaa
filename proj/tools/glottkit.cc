// glottkit/tools/glottkit.cc

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

// Command-line front end. Exit codes: 0 success, 1 bad configuration or
// usage, 2 runtime failure (including zero successful files), 3 unvoiced
// input to a fit.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "glottkit/abcde.h"
#include "glottkit/error.h"
#include "glottkit/phase_features.h"
#include "glottkit/pipeline.h"
#include "glottkit/proxy_classifier.h"
#include "glottkit/synth.h"

namespace fs = std::filesystem;
using namespace glottkit;

namespace {

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> sets;
  int jobs = 1;
};

PipelineConfig LoadConfig(const CommonOptions& o) {
  PipelineConfig cfg = o.config_path.empty() ? PipelineConfig()
                                             : PipelineConfig::FromJsonFile(o.config_path);
  for (const auto& s : o.sets) cfg.Set(s);
  cfg.Validate();
  return cfg;
}

void AddCommon(CLI::App* app, CommonOptions& o) {
  app->add_option("--config", o.config_path, "JSON config with flat dotted keys");
  app->add_option("--set", o.sets, "Override a config key, key=value")->take_all();
}

void WriteText(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw Error(ErrorKind::kIoError, "cannot write " + out);
  f << text;
  if (!f) throw Error(ErrorKind::kIoError, "write failed for " + out);
}

std::string ReadText(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::kMissingFile, path.string());
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

// Provenance goes to stderr when the payload itself is on stdout.
void EmitHash(const PipelineConfig& cfg, const std::string& out) {
  std::ostream& os = (out.empty() || out == "-") ? std::cerr : std::cout;
  os << "config_hash " << cfg.Hash() << "\n";
}

std::string FormatNumber(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

LinearClassifier LoadProxy(const std::string& path) {
  return ClassifierFromJson(ReadText(path));
}

int CmdExtract(const CommonOptions& o, const std::vector<std::string>& inputs,
               const std::string& out, const std::string& format) {
  const PipelineConfig cfg = LoadConfig(o);
  std::optional<LinearClassifier> proxy;
  std::optional<AbcdeModel> abcde;
  if (!cfg.Str("proxy.model").empty()) proxy = LoadProxy(cfg.Str("proxy.model"));
  if (!cfg.Str("abcde.model").empty()) abcde = LoadAbcde(cfg.Str("abcde.model"));
  const int rate = cfg.Int("audio.sample_rate");

  std::vector<FeatureRecord> rows(inputs.size());
  ParallelFor(inputs.size(), o.jobs, [&](std::size_t i) {
    try {
      const AudioBuffer buf = LoadCanonical(inputs[i], rate);
      rows[i] = ExtractFeatures(buf, inputs[i], cfg, proxy ? &*proxy : nullptr,
                                abcde ? &*abcde : nullptr);
    } catch (const std::exception& e) {
      rows[i] = FeatureRecord{};
      rows[i].source = inputs[i];
      rows[i].config_hash = cfg.Hash();
      rows[i].error = e.what();
    }
  });
  // Failed rows carry every column as NA.
  std::vector<std::string> names;
  for (const auto& r : rows) {
    if (r.error.empty() && names.empty()) {
      for (const auto& [k, v] : r.features) names.push_back(k);
    }
  }
  std::size_t ok = 0;
  for (auto& r : rows) {
    if (!r.error.empty()) {
      for (const auto& n : names) r.Set(n, std::nullopt);
      std::cerr << "error " << r.source << ": " << r.error << "\n";
    } else {
      ++ok;
    }
  }
  std::ostringstream os;
  if (format == "json") {
    WriteFeatureJson(rows, cfg, os);
  } else {
    WriteFeatureCsv(rows, os);
    if (!out.empty() && out != "-") {
      nlohmann::json meta;
      meta["config_hash"] = cfg.Hash();
      meta["version"] = kGlottkitVersion;
      meta["abcde_version"] = kAbcdeVersion;
      meta["config"] = cfg.ToJson();
      WriteText(meta.dump(2) + "\n", out + ".meta.json");
    }
  }
  WriteText(os.str(), out);
  EmitHash(cfg, out);
  return ok > 0 ? 0 : 2;
}

int CmdEstimate(const CommonOptions& o, const std::string& input, const std::string& out_dir) {
  const PipelineConfig cfg = LoadConfig(o);
  const AudioBuffer buf = LoadCanonical(input, cfg.Int("audio.sample_rate"));
  const EstimateOutput est = EstimateFromAudio(buf, cfg);
  const FitResult& fit = est.fit;
  fs::create_directories(out_dir);
  nlohmann::json j;
  j["alpha"] = fit.params.alpha;
  j["beta"] = fit.params.beta;
  j["delta"] = fit.params.delta;
  j["loss"] = fit.loss_curve.empty() ? 0.0 : fit.loss_curve.back();
  j["converged"] = fit.converged;
  j["iterations"] = fit.iterations;
  j["grad_norm"] = fit.grad_norm_final;
  j["f0_hz"] = fit.f0;
  j["loss_curve"] = fit.loss_curve;
  j["alignment"] = {{"phase", fit.alignment.phase},
                    {"rate", fit.alignment.rate},
                    {"gain", fit.alignment.gain}};
  j["config_hash"] = cfg.Hash();
  j["version"] = kGlottkitVersion;
  WriteText(j.dump(2) + "\n", (fs::path(out_dir) / "fit.json").string());
  RenderSvg({{"left", PhasePortrait(est.trajectory, Fold::kLeft)},
             {"right", PhasePortrait(est.trajectory, Fold::kRight)}},
            fs::path(out_dir) / "portrait.svg");
  std::cout << "alpha " << FormatNumber(fit.params.alpha) << " beta "
            << FormatNumber(fit.params.beta) << " delta " << FormatNumber(fit.params.delta)
            << "\n";
  EmitHash(cfg, out_dir);
  return 0;
}

int CmdSynth(const CommonOptions& o, const std::string& out) {
  const PipelineConfig cfg = LoadConfig(o);
  const AudioBuffer buf = SynthVowel(cfg.SynthParams(), cfg.Synth());
  WriteWav(buf, out,
           cfg.Str("synth.encoding") == "float32" ? WavEncoding::kFloat32 : WavEncoding::kPcm16);
  EmitHash(cfg, out);
  return 0;
}

fs::path SidecarFor(const std::string& wav) { return fs::path(wav + ".labels"); }

int CmdProxyTrain(const CommonOptions& o, const std::vector<std::string>& inputs,
                  const std::string& table_in, const std::string& table_out,
                  const std::string& out) {
  const PipelineConfig cfg = LoadConfig(o);
  LabeledFrameTable table;
  if (!table_in.empty()) table = ReadTableCsv(table_in);
  for (const auto& wav : inputs) {
    const AudioBuffer buf = LoadCanonical(wav, cfg.Int("audio.sample_rate"));
    AppendLabeledFrames(table, buf, ReadLabelSidecar(SidecarFor(wav)), wav, cfg.ProxyFrames());
  }
  if (!table_out.empty()) WriteTableCsv(table, table_out);
  const LinearClassifier m = TrainLogistic(table, cfg.Logistic());
  std::size_t correct = 0;
  for (std::size_t i = 0; i < table.num_rows(); ++i) {
    correct += (Score(m, table.features[i]) > 0.5 ? 1 : 0) == table.labels[i];
  }
  WriteText(ClassifierToJson(m) + "\n", out);
  std::cerr << "rows " << table.num_rows() << " train_accuracy "
            << FormatNumber(static_cast<double>(correct) / static_cast<double>(table.num_rows()))
            << "\n";
  EmitHash(cfg, out);
  return 0;
}

int CmdProxyScore(const CommonOptions& o, const std::vector<std::string>& inputs,
                  const std::string& model_path, const std::string& out) {
  const PipelineConfig cfg = LoadConfig(o);
  const LinearClassifier m = LoadProxy(model_path.empty() ? cfg.Str("proxy.model") : model_path);
  std::vector<std::string> lines(inputs.size());
  std::size_t ok = 0;
  ParallelFor(inputs.size(), o.jobs, [&](std::size_t i) {
    std::ostringstream os;
    try {
      const ScoreSummary s =
          ScoreRecording(m, LoadCanonical(inputs[i], cfg.Int("audio.sample_rate")),
                         cfg.ProxyFrames());
      os << inputs[i] << "," << FormatNumber(s.mean) << "," << FormatNumber(s.std) << ","
         << FormatNumber(s.fraction_above_half) << "," << s.frames << ",";
    } catch (const std::exception& e) {
      std::string msg = e.what();
      for (char& c : msg) c = c == ',' ? ';' : c;
      os << inputs[i] << ",NA,NA,NA,NA," << msg;
    }
    lines[i] = os.str();
  });
  std::ostringstream os;
  os << "source,proxy_mean,proxy_std,proxy_frac,frames,error\n";
  for (const auto& l : lines) {
    os << l << "\n";
    ok += l.back() == ',';
  }
  WriteText(os.str(), out);
  EmitHash(cfg, out);
  return ok > 0 ? 0 : 2;
}

int CmdAbcdeTrain(const CommonOptions& o, const std::vector<std::string>& inputs,
                  const std::string& labels_path, const std::string& out) {
  const PipelineConfig cfg = LoadConfig(o);
  const auto labels = ReadSourceLabels(labels_path);
  const StackWindowConfig wcfg = cfg.Windows();
  std::vector<AbcdeExample> data;
  for (const auto& wav : inputs) {
    const auto label = LookupLabel(labels, wav);
    if (!label) throw Error(ErrorKind::kInvalidArgument, "no label for " + wav);
    for (auto& x : AudioWindows(LoadCanonical(wav, cfg.Int("audio.sample_rate")), wcfg)) {
      data.push_back({std::move(x), *label});
    }
  }
  if (data.empty()) throw Error(ErrorKind::kNoFrames, "no stack windows in the inputs");
  AbcdeModel arch = MakeAbcdeModel(wcfg.input_dim(), cfg.AbcdeHidden(), cfg.Int("abcde.latent"));
  arch.windows = wcfg;
  arch.lambda_recon = cfg.Num("abcde.lambda_recon");
  arch.lambda_disc = cfg.Num("abcde.lambda_disc");
  const AbcdeTrainResult res = TrainAbcde(arch, data, cfg.AbcdeTrain());
  SaveAbcde(res.model, out);
  std::cerr << "windows " << data.size() << " loss " << FormatNumber(res.history.front())
            << " -> " << FormatNumber(res.history.back()) << "\n";
  EmitHash(cfg, out);
  return 0;
}

int CmdAbcdeEncode(const CommonOptions& o, const std::vector<std::string>& inputs,
                   const std::string& model_path, const std::string& out) {
  const PipelineConfig cfg = LoadConfig(o);
  const AbcdeModel m = LoadAbcde(model_path.empty() ? cfg.Str("abcde.model") : model_path);
  std::vector<std::string> blocks(inputs.size());
  std::vector<bool> good(inputs.size(), false);
  ParallelFor(inputs.size(), o.jobs, [&](std::size_t i) {
    std::ostringstream os;
    try {
      for (const auto& code :
           LatentFeatures(m, LoadCanonical(inputs[i], cfg.Int("audio.sample_rate")))) {
        os << inputs[i] << "," << code.window_index;
        for (double z : code.z) os << "," << FormatNumber(z);
        os << ",\n";
      }
      good[i] = true;
    } catch (const std::exception& e) {
      std::string msg = e.what();
      for (char& c : msg) c = c == ',' ? ';' : c;
      os << inputs[i] << ",NA";
      for (int j = 0; j < m.latent_dim(); ++j) os << ",NA";
      os << "," << msg << "\n";
    }
    blocks[i] = os.str();
  });
  std::ostringstream os;
  os << "source,window";
  for (int j = 0; j < m.latent_dim(); ++j) os << ",z" << j;
  os << ",error\n";
  for (const auto& b : blocks) os << b;
  WriteText(os.str(), out);
  EmitHash(cfg, out);
  return std::count(good.begin(), good.end(), true) > 0 ? 0 : 2;
}

int CmdEval(const CommonOptions& o, const std::string& table_path,
            const std::string& labels_path, bool permute, const std::string& out) {
  const PipelineConfig cfg = LoadConfig(o);
  FeatureTable table = ReadFeatureCsv(table_path);
  std::vector<int> labels(table.sources.size(), -1);
  const std::string column = cfg.Str("eval.label_column");
  const auto col = std::find(table.names.begin(), table.names.end(), column);
  if (!labels_path.empty()) {
    const auto map = ReadSourceLabels(labels_path);
    for (std::size_t i = 0; i < labels.size(); ++i) {
      labels[i] = LookupLabel(map, table.sources[i]).value_or(-1);
    }
  } else if (col != table.names.end()) {
    const auto c = static_cast<std::size_t>(col - table.names.begin());
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const auto& v = table.values[i][c];
      labels[i] = (v && (*v == 0.0 || *v == 1.0)) ? static_cast<int>(*v) : -1;
    }
  } else {
    throw Error(ErrorKind::kBadConfig, "no labels: give --labels or a '" + column + "' column");
  }
  if (col != table.names.end()) {
    const auto c = static_cast<std::size_t>(col - table.names.begin());
    table.names.erase(table.names.begin() + static_cast<long>(c));
    for (auto& row : table.values) row.erase(row.begin() + static_cast<long>(c));
  }
  EvalConfig ecfg;
  ecfg.folds = cfg.Int("eval.folds");
  ecfg.seed = cfg.Seed();
  ecfg.permute_labels = permute;
  ecfg.logistic = cfg.Logistic();
  const EvalReport rep = EvaluateTable(table, labels, ecfg);
  nlohmann::json j = rep.ToJson();
  j["permuted"] = permute;
  j["folds"] = ecfg.folds;
  j["config_hash"] = cfg.Hash();
  j["version"] = kGlottkitVersion;
  WriteText(j.dump(2) + "\n", out);
  EmitHash(cfg, out);
  return 0;
}

int ExitCodeFor(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::kBadConfig:
      return 1;
    case ErrorKind::kUnvoicedTarget:
      return 3;
    default:
      return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"glottkit: vocal-fold model fitting and voice proxy features"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kGlottkitVersion);

  CommonOptions common;
  std::vector<std::string> inputs;
  std::string input, out, format = "csv", model, labels, label_column, table_in, table_out;
  bool permute = false;
  int folds = 0;

  auto* extract = app.add_subcommand("extract", "Proxy features for WAV files");
  AddCommon(extract, common);
  extract->add_option("inputs", inputs, "WAV files")->required();
  extract->add_option("--out", out, "Output file (stdout when omitted)");
  extract->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
  extract->add_option("--jobs", common.jobs)->check(CLI::PositiveNumber);

  auto* estimate = app.add_subcommand("estimate", "Fit the 1-mass model to one recording");
  AddCommon(estimate, common);
  estimate->add_option("input", input, "WAV file")->required();
  estimate->add_option("--out", out, "Output directory")->required();

  auto* synth = app.add_subcommand("synth", "Synthesize a vowel from model parameters");
  AddCommon(synth, common);
  synth->add_option("--out", out, "Output WAV")->required();

  auto* ptrain = app.add_subcommand("proxy-train",
                                    "Train the frame classifier; labels come from <wav>.labels");
  AddCommon(ptrain, common);
  ptrain->add_option("inputs", inputs, "WAV files");
  ptrain->add_option("--table", table_in, "Existing labelled frame table (CSV)");
  ptrain->add_option("--save-table", table_out, "Write the assembled frame table");
  ptrain->add_option("--out", out, "Model JSON")->required();

  auto* pscore = app.add_subcommand("proxy-score", "Recording-level classifier scores");
  AddCommon(pscore, common);
  pscore->add_option("inputs", inputs, "WAV files")->required();
  pscore->add_option("--model", model, "Classifier JSON");
  pscore->add_option("--out", out);
  pscore->add_option("--jobs", common.jobs)->check(CLI::PositiveNumber);

  auto* atrain = app.add_subcommand("abcde-train", "Train the latent-discovery autoencoder");
  AddCommon(atrain, common);
  atrain->add_option("inputs", inputs, "WAV files")->required();
  atrain->add_option("--labels", labels, "'source label' lines")->required();
  atrain->add_option("--out", out, "Model JSON")->required();

  auto* aencode = app.add_subcommand("abcde-encode", "Latent codes per stack window");
  AddCommon(aencode, common);
  aencode->add_option("inputs", inputs, "WAV files")->required();
  aencode->add_option("--model", model, "Autoencoder JSON");
  aencode->add_option("--out", out);
  aencode->add_option("--jobs", common.jobs)->check(CLI::PositiveNumber);

  auto* eval = app.add_subcommand("eval", "Cross-validated evaluation of a feature table");
  AddCommon(eval, common);
  eval->add_option("table", input, "Feature CSV")->required();
  eval->add_option("--labels", labels, "'source label' lines");
  eval->add_option("--label-column", label_column, "Label column in the table");
  eval->add_option("--folds", folds, "Number of folds");
  eval->add_flag("--permute-labels", permute, "Seeded label permutation control");
  eval->add_option("--out", out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*extract) return CmdExtract(common, inputs, out, format);
    if (*estimate) return CmdEstimate(common, input, out);
    if (*synth) return CmdSynth(common, out);
    if (*ptrain) {
      if (inputs.empty() && table_in.empty()) {
        std::cerr << "proxy-train needs WAV inputs or --table\n";
        return 1;
      }
      return CmdProxyTrain(common, inputs, table_in, table_out, out);
    }
    if (*pscore) return CmdProxyScore(common, inputs, model, out);
    if (*atrain) return CmdAbcdeTrain(common, inputs, labels, out);
    if (*aencode) return CmdAbcdeEncode(common, inputs, model, out);
    if (*eval) {
      if (!label_column.empty()) {
        common.sets.push_back("eval.label_column=" + label_column);
      }
      if (eval->count("--folds")) common.sets.push_back("eval.folds=" + std::to_string(folds));
      return CmdEval(common, input, labels, permute, out);
    }
  } catch (const Error& e) {
    std::cerr << "glottkit: " << e.what() << "\n";
    return ExitCodeFor(e);
  } catch (const std::exception& e) {
    std::cerr << "glottkit: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
