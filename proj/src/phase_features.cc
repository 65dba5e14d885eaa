// glottkit/phase_features.cc

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

#include "glottkit/phase_features.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "glottkit/error.h"

namespace glottkit {

Portrait PhasePortrait(const TrajectorySet& traj, Fold fold) {
  if (traj.num_states() < 2 || traj.dim() < 4) {
    throw Error(ErrorKind::kInvalidArgument, "portrait needs >= 2 states of a 1-mass run");
  }
  const std::size_t xc = fold == Fold::kLeft ? 0 : 2;
  Portrait out(traj.num_states());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = {traj.at(i, xc), traj.at(i, xc + 1)};
  }
  return out;
}

double PolygonArea(const Portrait& poly) {
  const std::size_t n = poly.size();
  if (n < 3) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const PhasePoint& a = poly[i];
    const PhasePoint& b = poly[(i + 1) % n];
    acc += a.x * b.v - b.x * a.v;
  }
  return 0.5 * std::abs(acc);
}

std::vector<Portrait> DetectCycles(const Portrait& p) {
  std::vector<std::size_t> idx;  // crossing lies between idx and idx + 1
  std::vector<PhasePoint> at;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    if (p[i].x < 0.0 && p[i + 1].x >= 0.0) {
      const double s = p[i].x / (p[i].x - p[i + 1].x);
      idx.push_back(i);
      at.push_back({0.0, p[i].v + s * (p[i + 1].v - p[i].v)});
    }
  }
  std::vector<Portrait> cycles;
  for (std::size_t c = 0; c + 1 < idx.size(); ++c) {
    Portrait cyc;
    cyc.push_back(at[c]);
    for (std::size_t i = idx[c] + 1; i <= idx[c + 1]; ++i) cyc.push_back(p[i]);
    cyc.push_back(at[c + 1]);
    cycles.push_back(std::move(cyc));
  }
  return cycles;
}

double LimitCycleArea(const Portrait& portrait, double tail_fraction) {
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "tail_fraction must be in (0, 1]");
  }
  const auto keep = static_cast<std::size_t>(
      std::ceil(tail_fraction * static_cast<double>(portrait.size())));
  const Portrait tail(portrait.end() - static_cast<long>(std::min(keep, portrait.size())),
                      portrait.end());
  const auto cycles = DetectCycles(tail);
  if (cycles.empty()) throw Error(ErrorKind::kNoCycleDetected, "no full cycle in tail");
  return PolygonArea(cycles.back());
}

double AsymmetryIndex(const TrajectorySet& traj) {
  if (traj.dim() < 4) {
    throw Error(ErrorKind::kDimensionMismatch, "asymmetry index needs a 1-mass run");
  }
  const std::size_t n = traj.num_states();
  const std::size_t from = n / 2;
  double dd = 0.0, ll = 0.0, rr = 0.0;
  for (std::size_t i = from; i < n; ++i) {
    const double xl = traj.at(i, 0), xr = traj.at(i, 2);
    dd += (xl - xr) * (xl - xr);
    ll += xl * xl;
    rr += xr * xr;
  }
  const double m = static_cast<double>(std::max<std::size_t>(n - from, 1));
  return std::sqrt(dd / m) / (std::sqrt(ll / m) + std::sqrt(rr / m) + 1e-12);
}

namespace {

double PointSegment(const PhasePoint& p, const PhasePoint& a, const PhasePoint& b) {
  const double dx = b.x - a.x, dv = b.v - a.v;
  const double len2 = dx * dx + dv * dv;
  double t = len2 > 0.0 ? ((p.x - a.x) * dx + (p.v - a.v) * dv) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double ex = a.x + t * dx - p.x, ev = a.v + t * dv - p.v;
  return std::sqrt(ex * ex + ev * ev);
}

double Directed(const Portrait& from, const Portrait& to) {
  double worst = 0.0;
  for (const PhasePoint& p : from) {
    double best = std::numeric_limits<double>::infinity();
    if (to.size() == 1) best = PointSegment(p, to[0], to[0]);
    for (std::size_t i = 0; i + 1 < to.size(); ++i) {
      best = std::min(best, PointSegment(p, to[i], to[i + 1]));
    }
    worst = std::max(worst, best);
  }
  return worst;
}

double Diameter(const Portrait& p) {
  double d2 = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = i + 1; j < p.size(); ++j) {
      const double dx = p[i].x - p[j].x, dv = p[i].v - p[j].v;
      d2 = std::max(d2, dx * dx + dv * dv);
    }
  }
  return std::sqrt(d2);
}

}  // namespace

double HausdorffDistance(const Portrait& a, const Portrait& b) {
  if (a.empty() || b.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "Hausdorff distance of an empty set");
  }
  return std::max(Directed(a, b), Directed(b, a));
}

double CycleVariability(const Portrait& portrait) {
  const auto cycles = DetectCycles(portrait);
  if (cycles.size() < 2) {
    throw Error(ErrorKind::kNoCycleDetected, "need at least two full cycles");
  }
  double dist = 0.0, diam = 0.0;
  for (std::size_t c = 0; c < cycles.size(); ++c) {
    diam += Diameter(cycles[c]);
    if (c > 0) dist += HausdorffDistance(cycles[c - 1], cycles[c]);
  }
  dist /= static_cast<double>(cycles.size() - 1);
  diam /= static_cast<double>(cycles.size());
  return diam > 0.0 ? dist / diam : 0.0;
}

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string Fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

std::string Escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string SvgDocument(const std::vector<LabeledPortrait>& portraits) {
  if (portraits.empty()) throw Error(ErrorKind::kInvalidArgument, "no portraits to render");
  constexpr double kW = 640, kH = 480, kMargin = 50;
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
  double vlo = xlo, vhi = -xlo;
  for (const auto& lp : portraits) {
    for (const auto& pt : lp.points) {
      xlo = std::min(xlo, pt.x);
      xhi = std::max(xhi, pt.x);
      vlo = std::min(vlo, pt.v);
      vhi = std::max(vhi, pt.v);
    }
  }
  if (!std::isfinite(xlo)) xlo = vlo = -1.0, xhi = vhi = 1.0;
  if (xhi - xlo < 1e-12) xlo -= 1.0, xhi += 1.0;
  if (vhi - vlo < 1e-12) vlo -= 1.0, vhi += 1.0;
  auto sx = [&](double x) { return kMargin + (x - xlo) / (xhi - xlo) * (kW - 2 * kMargin); };
  auto sy = [&](double v) { return kH - kMargin - (v - vlo) / (vhi - vlo) * (kH - 2 * kMargin); };

  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
       "viewBox=\"0 0 640 480\">\n";
  s += "<rect x=\"0\" y=\"0\" width=\"640\" height=\"480\" fill=\"white\"/>\n";
  const std::string x0 = Fmt(kMargin), x1 = Fmt(kW - kMargin);
  const std::string y0 = Fmt(kH - kMargin), y1 = Fmt(kMargin);
  s += "<line id=\"axis-x\" x1=\"" + x0 + "\" y1=\"" + y0 + "\" x2=\"" + x1 + "\" y2=\"" +
       y0 + "\" stroke=\"black\"/>\n";
  s += "<line id=\"axis-v\" x1=\"" + x0 + "\" y1=\"" + y0 + "\" x2=\"" + x0 + "\" y2=\"" +
       y1 + "\" stroke=\"black\"/>\n";
  s += "<text x=\"" + Fmt(kW / 2) + "\" y=\"" + Fmt(kH - 15) +
       "\" text-anchor=\"middle\" font-size=\"14\">displacement x</text>\n";
  s += "<text x=\"15\" y=\"" + Fmt(kH / 2) + "\" text-anchor=\"middle\" font-size=\"14\" "
       "transform=\"rotate(-90 15 " + Fmt(kH / 2) + ")\">velocity v</text>\n";
  s += "<text x=\"" + x0 + "\" y=\"" + Fmt(kH - kMargin + 15) + "\" font-size=\"10\">" +
       Fmt(xlo) + "</text>\n";
  s += "<text x=\"" + x1 + "\" y=\"" + Fmt(kH - kMargin + 15) +
       "\" text-anchor=\"end\" font-size=\"10\">" + Fmt(xhi) + "</text>\n";
  s += "<text x=\"" + Fmt(kMargin - 5) + "\" y=\"" + y0 +
       "\" text-anchor=\"end\" font-size=\"10\">" + Fmt(vlo) + "</text>\n";
  s += "<text x=\"" + Fmt(kMargin - 5) + "\" y=\"" + y1 +
       "\" text-anchor=\"end\" font-size=\"10\">" + Fmt(vhi) + "</text>\n";

  for (std::size_t i = 0; i < portraits.size(); ++i) {
    const std::string color = kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))];
    s += "<polyline id=\"stroke-" + std::to_string(i) + "\" fill=\"none\" stroke=\"" +
         color + "\" stroke-width=\"1\" points=\"";
    for (std::size_t j = 0; j < portraits[i].points.size(); ++j) {
      if (j) s += ' ';
      s += Fmt(sx(portraits[i].points[j].x)) + "," + Fmt(sy(portraits[i].points[j].v));
    }
    s += "\"/>\n";
    const double ly = kMargin + 18.0 * static_cast<double>(i);
    s += "<rect id=\"legend-" + std::to_string(i) + "\" x=\"" + Fmt(kW - kMargin - 130) +
         "\" y=\"" + Fmt(ly - 8) + "\" width=\"12\" height=\"4\" fill=\"" + color + "\"/>\n";
    s += "<text x=\"" + Fmt(kW - kMargin - 112) + "\" y=\"" + Fmt(ly) +
         "\" font-size=\"12\">" + Escape(portraits[i].label) + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

void RenderSvg(const std::vector<LabeledPortrait>& portraits,
               const std::filesystem::path& path) {
  const std::string doc = SvgDocument(portraits);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorKind::kIoError, "cannot open " + path.string());
  f << doc;
  if (!f) throw Error(ErrorKind::kIoError, "write failed for " + path.string());
}

}  // namespace glottkit
