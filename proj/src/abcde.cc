// glottkit/abcde.cc

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

#include "glottkit/abcde.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"

#include "glottkit/error.h"

namespace glottkit {

namespace {

constexpr double kCeFloor = 1e-7;

struct Activations {
  std::vector<Eigen::MatrixXd> a;  // a[0] = input, a[l+1] = output of layer l
};

Activations ForwardCache(const DenseNet& net, const Eigen::MatrixXd& x) {
  Activations c;
  c.a.push_back(x);
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    Eigen::MatrixXd pre = (net.weights[l] * c.a.back()).colwise() + net.biases[l];
    if (l + 1 < net.num_layers()) pre = pre.array().tanh().matrix();
    c.a.push_back(std::move(pre));
  }
  return c;
}

// Accumulates parameter gradients into dW/db and returns the input gradient.
Eigen::MatrixXd Backward(const DenseNet& net, const Activations& c, Eigen::MatrixXd g,
                         std::vector<Eigen::MatrixXd>& dW, std::vector<Eigen::VectorXd>& db) {
  dW.resize(net.num_layers());
  db.resize(net.num_layers());
  for (std::size_t l = net.num_layers(); l-- > 0;) {
    if (l + 1 < net.num_layers()) {
      g = (g.array() * (1.0 - c.a[l + 1].array().square())).matrix();
    }
    dW[l] = g * c.a[l].transpose();
    db[l] = g.rowwise().sum();
    g = net.weights[l].transpose() * g;
  }
  return g;
}

void CheckInput(const AbcdeModel& m, std::size_t n) {
  if (n != static_cast<std::size_t>(m.input_dim())) {
    throw Error(ErrorKind::kDimensionMismatch, "input width differs from encoder");
  }
}

Eigen::MatrixXd BatchMatrix(const AbcdeModel& m, const std::vector<AbcdeExample>& batch) {
  if (batch.empty()) throw Error(ErrorKind::kInvalidArgument, "empty batch");
  const int d = m.input_dim();
  Eigen::MatrixXd x(d, static_cast<Eigen::Index>(batch.size()));
  for (std::size_t i = 0; i < batch.size(); ++i) {
    CheckInput(m, batch[i].x.size());
    for (int j = 0; j < d; ++j) {
      const double mu = m.input_mean.empty() ? 0.0 : m.input_mean[j];
      x(j, static_cast<Eigen::Index>(i)) = (batch[i].x[j] - mu) / m.input_scale;
    }
  }
  return x;
}

double HeadLogit(const AbcdeModel& m, const Eigen::VectorXd& z) {
  double t = m.head.bias;
  for (Eigen::Index j = 0; j < z.size(); ++j) t += m.head.weights[j] * z(j);
  return t;
}

struct Pass {
  Activations enc, dec;
  CompositeLossValue loss;
  std::vector<double> logits, probs;
};

Pass Run(const AbcdeModel& m, const std::vector<AbcdeExample>& batch,
         const Eigen::MatrixXd& x) {
  Pass p;
  p.enc = ForwardCache(m.encoder, x);
  const Eigen::MatrixXd& z = p.enc.a.back();
  p.dec = ForwardCache(m.decoder, z);
  const auto n = static_cast<double>(batch.size());
  p.loss.recon = (p.dec.a.back() - x).squaredNorm() / n;
  double ce = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const double t = HeadLogit(m, z.col(static_cast<Eigen::Index>(i)));
    const double pr = Sigmoid(t);
    p.logits.push_back(t);
    p.probs.push_back(pr);
    ce -= batch[i].label == 1 ? std::log(std::max(pr, kCeFloor))
                              : std::log(std::max(1.0 - pr, kCeFloor));
  }
  p.loss.disc = ce / n;
  p.loss.total = m.lambda_recon * p.loss.recon + m.lambda_disc * p.loss.disc;
  return p;
}

void AppendNet(const DenseNet& net, std::vector<double>& out) {
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    const Eigen::MatrixXd& w = net.weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) out.push_back(w(r, c));
    }
    for (Eigen::Index r = 0; r < net.biases[l].size(); ++r) out.push_back(net.biases[l](r));
  }
}

std::size_t ReadNet(DenseNet& net, std::span<const double> flat, std::size_t pos) {
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    Eigen::MatrixXd& w = net.weights[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = flat[pos++];
    }
    for (Eigen::Index r = 0; r < net.biases[l].size(); ++r) net.biases[l](r) = flat[pos++];
  }
  return pos;
}

Eigen::VectorXd ToVector(std::span<const double> x) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) v(static_cast<Eigen::Index>(i)) = x[i];
  return v;
}

}  // namespace

Eigen::MatrixXd DenseNet::Forward(const Eigen::MatrixXd& x) const {
  if (x.rows() != input_dim()) {
    throw Error(ErrorKind::kDimensionMismatch, "input width differs from net");
  }
  return ForwardCache(*this, x).a.back();
}

DenseNet MakeDenseNet(const std::vector<int>& sizes) {
  if (sizes.size() < 2) throw Error(ErrorKind::kInvalidArgument, "net needs >= 2 layer sizes");
  DenseNet net;
  net.sizes = sizes;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    if (sizes[l] <= 0 || sizes[l + 1] <= 0) {
      throw Error(ErrorKind::kInvalidArgument, "layer sizes must be positive");
    }
    net.weights.push_back(Eigen::MatrixXd::Zero(sizes[l + 1], sizes[l]));
    net.biases.push_back(Eigen::VectorXd::Zero(sizes[l + 1]));
  }
  return net;
}

AbcdeModel MakeAbcdeModel(int input_dim, const std::vector<int>& hidden, int latent_dim) {
  std::vector<int> enc = {input_dim};
  enc.insert(enc.end(), hidden.begin(), hidden.end());
  enc.push_back(latent_dim);
  std::vector<int> dec(enc.rbegin(), enc.rend());
  AbcdeModel m;
  m.encoder = MakeDenseNet(enc);
  m.decoder = MakeDenseNet(dec);
  m.head.weights.assign(static_cast<std::size_t>(latent_dim), 0.0);
  m.head.mean.assign(static_cast<std::size_t>(latent_dim), 0.0);
  m.head.scale.assign(static_cast<std::size_t>(latent_dim), 1.0);
  m.input_mean.assign(static_cast<std::size_t>(input_dim), 0.0);
  return m;
}

void InitializeWeights(AbcdeModel& m, std::uint64_t seed, double range) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-range, range);
  for (DenseNet* net : {&m.encoder, &m.decoder}) {
    for (std::size_t l = 0; l < net->num_layers(); ++l) {
      Eigen::MatrixXd& w = net->weights[l];
      for (Eigen::Index r = 0; r < w.rows(); ++r) {
        for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = u(rng);
      }
      net->biases[l].setZero();
    }
  }
  for (double& w : m.head.weights) w = u(rng);
  m.head.bias = 0.0;
}

LatentCode Encode(const AbcdeModel& m, std::span<const double> x) {
  CheckInput(m, x.size());
  Eigen::VectorXd v = ToVector(x);
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    const double mu = m.input_mean.empty() ? 0.0 : m.input_mean[j];
    v(j) = (v(j) - mu) / m.input_scale;
  }
  const Eigen::MatrixXd z = m.encoder.Forward(v);
  LatentCode out;
  out.z.assign(z.data(), z.data() + z.size());
  return out;
}

std::vector<double> Decode(const AbcdeModel& m, const LatentCode& z) {
  if (z.z.size() != static_cast<std::size_t>(m.decoder.input_dim())) {
    throw Error(ErrorKind::kDimensionMismatch, "latent width differs from decoder");
  }
  const Eigen::MatrixXd y = m.decoder.Forward(ToVector(z.z));
  std::vector<double> out(static_cast<std::size_t>(y.size()));
  for (std::size_t j = 0; j < out.size(); ++j) {
    const double mu = m.input_mean.empty() ? 0.0 : m.input_mean[j];
    out[j] = y(static_cast<Eigen::Index>(j)) * m.input_scale + mu;
  }
  return out;
}

CompositeLossValue CompositeLoss(const AbcdeModel& m, const std::vector<AbcdeExample>& batch) {
  return Run(m, batch, BatchMatrix(m, batch)).loss;
}

std::vector<double> FlatParameters(const AbcdeModel& m) {
  std::vector<double> out;
  AppendNet(m.encoder, out);
  AppendNet(m.decoder, out);
  out.insert(out.end(), m.head.weights.begin(), m.head.weights.end());
  out.push_back(m.head.bias);
  return out;
}

void SetFlatParameters(AbcdeModel& m, std::span<const double> flat) {
  if (flat.size() != FlatParameters(m).size()) {
    throw Error(ErrorKind::kDimensionMismatch, "parameter vector length differs");
  }
  std::size_t pos = ReadNet(m.encoder, flat, 0);
  pos = ReadNet(m.decoder, flat, pos);
  for (double& w : m.head.weights) w = flat[pos++];
  m.head.bias = flat[pos];
}

namespace {

std::vector<double> GradientFromPass(const AbcdeModel& m, const std::vector<AbcdeExample>& batch,
                                     const Eigen::MatrixXd& x, const Pass& p) {
  const auto n = static_cast<double>(batch.size());
  const Eigen::MatrixXd& z = p.enc.a.back();
  std::vector<Eigen::MatrixXd> dWd, dWe;
  std::vector<Eigen::VectorXd> dbd, dbe;
  const Eigen::MatrixXd g_out = (2.0 * m.lambda_recon / n) * (p.dec.a.back() - x);
  Eigen::MatrixXd gz = Backward(m.decoder, p.dec, g_out, dWd, dbd);

  std::vector<double> dhead(m.head.weights.size(), 0.0);
  double dbias = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const double pr = p.probs[i];
    const bool floored = batch[i].label == 1 ? pr < kCeFloor : 1.0 - pr < kCeFloor;
    if (floored) continue;
    const double dt = m.lambda_disc / n * (pr - batch[i].label);
    const auto col = static_cast<Eigen::Index>(i);
    for (std::size_t j = 0; j < dhead.size(); ++j) {
      dhead[j] += dt * z(static_cast<Eigen::Index>(j), col);
      gz(static_cast<Eigen::Index>(j), col) += dt * m.head.weights[j];
    }
    dbias += dt;
  }
  Backward(m.encoder, p.enc, gz, dWe, dbe);

  DenseNet ge = m.encoder, gd = m.decoder;
  ge.weights = dWe;
  ge.biases = dbe;
  gd.weights = dWd;
  gd.biases = dbd;
  std::vector<double> out;
  AppendNet(ge, out);
  AppendNet(gd, out);
  out.insert(out.end(), dhead.begin(), dhead.end());
  out.push_back(dbias);
  return out;
}

}  // namespace

std::vector<double> CompositeGradient(const AbcdeModel& m,
                                      const std::vector<AbcdeExample>& batch) {
  const Eigen::MatrixXd x = BatchMatrix(m, batch);
  return GradientFromPass(m, batch, x, Run(m, batch, x));
}

AbcdeTrainResult TrainAbcde(const AbcdeModel& arch, const std::vector<AbcdeExample>& dataset,
                            const AbcdeTrainConfig& cfg) {
  if (dataset.empty()) throw Error(ErrorKind::kInvalidArgument, "empty dataset");
  AbcdeTrainResult res;
  AbcdeModel m = arch;
  const std::size_t d = static_cast<std::size_t>(m.input_dim());
  bool has0 = false, has1 = false;
  for (const auto& ex : dataset) {
    CheckInput(m, ex.x.size());
    has0 |= ex.label == 0;
    has1 |= ex.label == 1;
  }
  if (m.lambda_disc > 0.0 && !(has0 && has1)) {
    throw Error(ErrorKind::kSingleClassData, "discriminative loss needs both labels");
  }
  m.input_mean.assign(d, 0.0);
  for (const auto& ex : dataset) {
    for (std::size_t j = 0; j < d; ++j) m.input_mean[j] += ex.x[j];
  }
  for (double& v : m.input_mean) v /= static_cast<double>(dataset.size());
  double var = 0.0;
  for (const auto& ex : dataset) {
    for (std::size_t j = 0; j < d; ++j) var += std::pow(ex.x[j] - m.input_mean[j], 2);
  }
  var /= static_cast<double>(dataset.size() * d);
  m.input_scale = var > 0.0 ? std::sqrt(var) : 1.0;
  InitializeWeights(m, cfg.seed, cfg.init_range);

  const Eigen::MatrixXd x = BatchMatrix(m, dataset);
  Pass pass = Run(m, dataset, x);
  std::vector<double> params = FlatParameters(m);
  std::vector<double> grad = GradientFromPass(m, dataset, x, pass);
  double loss = pass.loss.total;
  res.history.push_back(loss);
  double lr = cfg.lr;
  AbcdeModel trial = m;
  std::vector<double> next(params.size());
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = 0; i < params.size(); ++i) next[i] = params[i] - lr * grad[i];
    SetFlatParameters(trial, next);
    Pass tp = Run(trial, dataset, x);
    if (std::isfinite(tp.loss.total) && tp.loss.total <= loss) {
      params.swap(next);
      m = trial;
      grad = GradientFromPass(m, dataset, x, tp);
      loss = tp.loss.total;
    } else {
      lr *= 0.5;
    }
    res.history.push_back(loss);
  }
  res.model = std::move(m);
  return res;
}

std::vector<std::vector<double>> StackWindows(const RepresentationStack& stack,
                                              const StackWindowConfig& cfg) {
  if (cfg.window_frames <= 0 || cfg.window_hop <= 0 || cfg.bands <= 0) {
    throw Error(ErrorKind::kInvalidArgument, "window, hop and bands must be positive");
  }
  const std::size_t frames = stack.num_frames();
  const auto w = static_cast<std::size_t>(cfg.window_frames);
  const auto hop = static_cast<std::size_t>(cfg.window_hop);
  const auto bands = static_cast<std::size_t>(cfg.bands);
  // Pooled log bands per layer, frames x bands.
  std::vector<Eigen::MatrixXd> pooled;
  for (const RowMatrix& layer : stack.layers) {
    const auto bins = static_cast<std::size_t>(layer.cols());
    if (bins < bands) throw Error(ErrorKind::kInvalidArgument, "more bands than bins");
    Eigen::MatrixXd pm(static_cast<Eigen::Index>(frames), static_cast<Eigen::Index>(bands));
    for (std::size_t f = 0; f < frames; ++f) {
      for (std::size_t b = 0; b < bands; ++b) {
        const std::size_t lo = b * bins / bands, hi = (b + 1) * bins / bands;
        double acc = 0.0;
        for (std::size_t k = lo; k < hi; ++k) {
          acc += layer(static_cast<Eigen::Index>(f), static_cast<Eigen::Index>(k));
        }
        pm(static_cast<Eigen::Index>(f), static_cast<Eigen::Index>(b)) =
            std::log(acc / static_cast<double>(hi - lo) + cfg.log_floor);
      }
    }
    pooled.push_back(std::move(pm));
  }
  std::vector<std::vector<double>> out;
  for (std::size_t start = 0; start + w <= frames; start += hop) {
    std::vector<double> v;
    v.reserve(w * bands * pooled.size());
    for (std::size_t f = start; f < start + w; ++f) {
      for (const auto& pm : pooled) {
        for (std::size_t b = 0; b < bands; ++b) {
          v.push_back(pm(static_cast<Eigen::Index>(f), static_cast<Eigen::Index>(b)));
        }
      }
    }
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<std::vector<double>> AudioWindows(const AudioBuffer& buf,
                                              const StackWindowConfig& cfg) {
  return StackWindows(BuildStack(buf, cfg.resolutions), cfg);
}

std::vector<LatentCode> LatentFeatures(const AbcdeModel& m, const AudioBuffer& buf) {
  const auto windows = AudioWindows(buf, m.windows);
  if (windows.empty()) throw Error(ErrorKind::kNoFrames, "audio too short for one window");
  std::vector<LatentCode> out;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    LatentCode c = Encode(m, windows[i]);
    c.window_index = i;
    out.push_back(std::move(c));
  }
  return out;
}

namespace {

nlohmann::json NetToJson(const DenseNet& net) {
  nlohmann::json j;
  j["sizes"] = net.sizes;
  j["weights"] = nlohmann::json::array();
  j["biases"] = nlohmann::json::array();
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    std::vector<double> w;
    for (Eigen::Index r = 0; r < net.weights[l].rows(); ++r) {
      for (Eigen::Index c = 0; c < net.weights[l].cols(); ++c) w.push_back(net.weights[l](r, c));
    }
    j["weights"].push_back(w);
    j["biases"].push_back(std::vector<double>(net.biases[l].data(),
                                              net.biases[l].data() + net.biases[l].size()));
  }
  return j;
}

DenseNet NetFromJson(const nlohmann::json& j) {
  DenseNet net = MakeDenseNet(j.at("sizes").get<std::vector<int>>());
  const auto& ws = j.at("weights");
  const auto& bs = j.at("biases");
  if (ws.size() != net.num_layers() || bs.size() != net.num_layers()) {
    throw Error(ErrorKind::kDimensionMismatch, "layer count differs from sizes");
  }
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    const auto w = ws[l].get<std::vector<double>>();
    const auto b = bs[l].get<std::vector<double>>();
    Eigen::MatrixXd& W = net.weights[l];
    if (w.size() != static_cast<std::size_t>(W.size()) ||
        b.size() != static_cast<std::size_t>(net.biases[l].size())) {
      throw Error(ErrorKind::kDimensionMismatch, "weight array size differs from sizes");
    }
    std::size_t k = 0;
    for (Eigen::Index r = 0; r < W.rows(); ++r) {
      for (Eigen::Index c = 0; c < W.cols(); ++c) W(r, c) = w[k++];
    }
    for (std::size_t i = 0; i < b.size(); ++i) net.biases[l](static_cast<Eigen::Index>(i)) = b[i];
  }
  return net;
}

}  // namespace

std::string AbcdeToJson(const AbcdeModel& m) {
  nlohmann::json j;
  j["version"] = kAbcdeVersion;
  j["encoder"] = NetToJson(m.encoder);
  j["decoder"] = NetToJson(m.decoder);
  j["head"] = {{"weights", m.head.weights}, {"bias", m.head.bias}};
  j["lambda_recon"] = m.lambda_recon;
  j["lambda_disc"] = m.lambda_disc;
  j["input_mean"] = m.input_mean;
  j["input_scale"] = m.input_scale;
  nlohmann::json res = nlohmann::json::array();
  for (const auto& r : m.windows.resolutions) {
    res.push_back({{"window_len", r.window_len}, {"hop", r.hop}, {"nfft", r.nfft}});
  }
  j["windows"] = {{"resolutions", res},
                  {"window_frames", m.windows.window_frames},
                  {"window_hop", m.windows.window_hop},
                  {"bands", m.windows.bands},
                  {"log_floor", m.windows.log_floor}};
  return j.dump();
}

AbcdeModel AbcdeFromJson(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.at("version").get<std::string>() != kAbcdeVersion) {
      throw Error(ErrorKind::kBadConfig, "unsupported model version");
    }
    AbcdeModel m;
    m.encoder = NetFromJson(j.at("encoder"));
    m.decoder = NetFromJson(j.at("decoder"));
    m.head.weights = j.at("head").at("weights").get<std::vector<double>>();
    m.head.bias = j.at("head").at("bias").get<double>();
    m.head.mean.assign(m.head.weights.size(), 0.0);
    m.head.scale.assign(m.head.weights.size(), 1.0);
    m.lambda_recon = j.at("lambda_recon").get<double>();
    m.lambda_disc = j.at("lambda_disc").get<double>();
    m.input_mean = j.at("input_mean").get<std::vector<double>>();
    m.input_scale = j.at("input_scale").get<double>();
    const auto& w = j.at("windows");
    m.windows.resolutions.clear();
    for (const auto& r : w.at("resolutions")) {
      m.windows.resolutions.push_back({r.at("window_len").get<std::size_t>(),
                                       r.at("hop").get<std::size_t>(),
                                       r.at("nfft").get<std::size_t>()});
    }
    m.windows.window_frames = w.at("window_frames").get<int>();
    m.windows.window_hop = w.at("window_hop").get<int>();
    m.windows.bands = w.at("bands").get<int>();
    m.windows.log_floor = w.at("log_floor").get<double>();
    if (m.encoder.output_dim() != m.decoder.input_dim() ||
        m.decoder.output_dim() != m.encoder.input_dim() ||
        m.head.weights.size() != static_cast<std::size_t>(m.latent_dim()) ||
        m.input_mean.size() != static_cast<std::size_t>(m.input_dim())) {
      throw Error(ErrorKind::kDimensionMismatch, "inconsistent model dimensions");
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kBadConfig, std::string("model JSON: ") + e.what());
  }
}

void SaveAbcde(const AbcdeModel& m, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorKind::kIoError, "cannot open " + path.string());
  f << AbcdeToJson(m) << "\n";
  if (!f) throw Error(ErrorKind::kIoError, "write failed for " + path.string());
}

AbcdeModel LoadAbcde(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::kMissingFile, path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return AbcdeFromJson(ss.str());
}

}  // namespace glottkit
