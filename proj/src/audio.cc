// glottkit/audio.cc

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

#include "glottkit/audio.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numbers>
#include <string>

#include "glottkit/error.h"

namespace glottkit {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t ReadU16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t ReadU32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::vector<unsigned char> Slurp(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(ErrorKind::kMissingFile, path.string());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kMissingFile, path.string());
  return std::vector<unsigned char>(std::istreambuf_iterator<char>(in),
                                    std::istreambuf_iterator<char>());
}

double KaiserWindow(double x, double beta) {
  // x in [-1, 1]
  if (std::abs(x) > 1.0) return 0.0;
  return std::cyl_bessel_i(0.0, beta * std::sqrt(1.0 - x * x)) /
         std::cyl_bessel_i(0.0, beta);
}

}  // namespace

AudioBuffer ReadWav(const std::filesystem::path& path) {
  const std::vector<unsigned char> bytes = Slurp(path);
  const std::string name = path.string();
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw Error(ErrorKind::kCorruptHeader, name + ": not a RIFF/WAVE file");
  }

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const unsigned char* data = nullptr;
  std::size_t data_len = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::uint32_t len = ReadU32(chunk + 4);
    const std::size_t body = pos + 8;
    if (body + len > bytes.size()) {
      // Tolerate a truncated data chunk only if it is the last one.
      if (std::memcmp(chunk, "data", 4) != 0) {
        throw Error(ErrorKind::kCorruptHeader, name + ": truncated chunk");
      }
    }
    const std::size_t avail = std::min<std::size_t>(len, bytes.size() - body);
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (avail < 16) {
        throw Error(ErrorKind::kCorruptHeader, name + ": short fmt chunk");
      }
      format = ReadU16(chunk + 8);
      channels = ReadU16(chunk + 10);
      rate = ReadU32(chunk + 12);
      bits = ReadU16(chunk + 22);
      if (format == kFormatExtensible) {
        if (avail < 40) {
          throw Error(ErrorKind::kCorruptHeader, name + ": short fmt chunk");
        }
        format = ReadU16(chunk + 8 + 24);  // first two bytes of SubFormat GUID
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = bytes.data() + body;
      data_len = avail;
    }
    pos = body + len + (len & 1u);
  }

  if (!have_fmt || data == nullptr) {
    throw Error(ErrorKind::kCorruptHeader, name + ": missing fmt or data chunk");
  }
  if (rate == 0) throw Error(ErrorKind::kCorruptHeader, name + ": zero rate");
  if (channels != 1) {
    throw Error(ErrorKind::kUnsupportedEncoding,
                name + ": " + std::to_string(channels) + " channels");
  }

  AudioBuffer buf;
  buf.sample_rate = static_cast<int>(rate);
  if (format == kFormatPcm && bits == 16) {
    const std::size_t n = data_len / 2;
    buf.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto v = static_cast<std::int16_t>(ReadU16(data + 2 * i));
      buf.samples[i] = static_cast<double>(v) / 32768.0;
    }
  } else if (format == kFormatFloat && bits == 32) {
    const std::size_t n = data_len / 4;
    buf.samples.resize(n);
    double peak = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint32_t raw = ReadU32(data + 4 * i);
      float f;
      std::memcpy(&f, &raw, sizeof f);
      if (!std::isfinite(f)) {
        throw Error(ErrorKind::kCorruptHeader, name + ": non-finite sample");
      }
      buf.samples[i] = static_cast<double>(f);
      peak = std::max(peak, std::abs(buf.samples[i]));
    }
    // Out-of-range float files are peak-normalized on load.
    if (peak > 1.0) {
      for (double& s : buf.samples) s /= peak;
    }
  } else {
    throw Error(ErrorKind::kUnsupportedEncoding,
                name + ": format " + std::to_string(format) + " with " +
                    std::to_string(bits) + " bits");
  }
  return buf;
}

AudioBuffer Resample(const AudioBuffer& buf, int target_rate) {
  if (target_rate <= 0) {
    throw Error(ErrorKind::kInvalidArgument, "target rate must be positive");
  }
  if (target_rate == buf.sample_rate) return buf;

  constexpr int kTaps = 64;
  constexpr double kBeta = 8.0;
  const double src = buf.sample_rate;
  const double dst = target_rate;
  // Cutoff in cycles per input sample.
  const double fc = 0.45 * std::min(src, dst) / src;
  const double half = kTaps / 2.0;

  const auto n_in = static_cast<std::ptrdiff_t>(buf.samples.size());
  const auto n_out = static_cast<std::size_t>(
      std::llround(static_cast<double>(n_in) * dst / src));
  AudioBuffer out;
  out.sample_rate = target_rate;
  out.samples.resize(n_out);

  for (std::size_t m = 0; m < n_out; ++m) {
    const double x = static_cast<double>(m) * src / dst;
    const auto base = static_cast<std::ptrdiff_t>(std::floor(x));
    double acc = 0.0, wsum = 0.0;
    for (std::ptrdiff_t k = base - kTaps / 2 + 1; k <= base + kTaps / 2; ++k) {
      const double t = x - static_cast<double>(k);
      const double arg = 2.0 * fc * t;
      const double sinc =
          std::abs(arg) < 1e-12
              ? 1.0
              : std::sin(std::numbers::pi * arg) / (std::numbers::pi * arg);
      const double h = 2.0 * fc * sinc * KaiserWindow(t / half, kBeta);
      wsum += h;
      if (k >= 0 && k < n_in) acc += h * buf.samples[static_cast<std::size_t>(k)];
    }
    // Unit DC gain regardless of the fractional position.
    out.samples[m] = wsum != 0.0 ? acc / wsum : 0.0;
  }
  for (double& s : out.samples) s = std::clamp(s, -1.0, 1.0);
  return out;
}

AudioBuffer Preemphasis(const AudioBuffer& buf, double coeff) {
  AudioBuffer out;
  out.sample_rate = buf.sample_rate;
  out.samples.resize(buf.samples.size());
  for (std::size_t n = 0; n < buf.samples.size(); ++n) {
    out.samples[n] =
        n == 0 ? buf.samples[0] : buf.samples[n] - coeff * buf.samples[n - 1];
  }
  return out;
}

std::size_t NumFrames(std::size_t len, std::size_t frame_len, std::size_t hop) {
  if (frame_len == 0 || hop == 0 || len < frame_len) return 0;
  return (len - frame_len) / hop + 1;
}

FrameSet Frame(std::span<const double> samples, int sample_rate,
               std::size_t frame_len, std::size_t hop) {
  if (frame_len < 1 || hop < 1) {
    throw Error(ErrorKind::kInvalidArgument, "frame_len and hop must be >= 1");
  }
  FrameSet fs;
  fs.hop = hop;
  fs.frame_len = frame_len;
  fs.sample_rate = sample_rate;
  const std::size_t n = NumFrames(samples.size(), frame_len, hop);
  fs.frames.resize(static_cast<Eigen::Index>(n),
                   static_cast<Eigen::Index>(frame_len));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < frame_len; ++j) {
      fs.frames(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          samples[i * hop + j];
    }
  }
  return fs;
}

FrameSet Frame(const AudioBuffer& buf, std::size_t frame_len, std::size_t hop) {
  return Frame(buf.samples, buf.sample_rate, frame_len, hop);
}

}  // namespace glottkit
