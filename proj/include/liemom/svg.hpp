//
// Project LieMomentum
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "liemom/experiments.hpp"

namespace liemom::svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool markers = false;
  bool dashed = false;
};

struct Plot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  int width = 720;
  int height = 480;
};

namespace detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string escape(const std::string& s) {
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

inline const char* color(std::size_t i) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  return palette[i % 6];
}

// Roughly five round tick values covering [lo, hi].
inline std::vector<double> ticks(double lo, double hi) {
  const double span = hi - lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (span / step <= 6.0) break;
  }
  std::vector<double> t;
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step) t.push_back(std::abs(v) < 1e-12 * span ? 0.0 : v);
  return t;
}

}  // namespace detail

// Pure SVG markup; finite points only, each series drawn as a polyline.
inline std::string render(const Plot& p) {
  const double left = 70, right = 170, top = 40, bottom = 55;
  const double pw = p.width - left - right, ph = p.height - top - bottom;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const Series& s : p.series)
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x0 -= 0.5, x1 += 0.5;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  const double ypad = 0.05 * (y1 - y0);
  y0 -= ypad;
  y1 += ypad;
  auto sx = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto sy = [&](double y) { return top + (y1 - y) / (y1 - y0) * ph; };
  using detail::num;

  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(p.width) + "\" height=\"" +
                    std::to_string(p.height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + num(left + pw / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" +
         detail::escape(p.title) + "</text>\n";
  out += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : detail::ticks(x0, x1)) {
    out += "<line x1=\"" + num(sx(t)) + "\" y1=\"" + num(top + ph) + "\" x2=\"" + num(sx(t)) + "\" y2=\"" +
           num(top + ph + 5) + "\" stroke=\"black\"/>";
    out += "<text x=\"" + num(sx(t)) + "\" y=\"" + num(top + ph + 18) + "\" text-anchor=\"middle\">" + num(t) + "</text>\n";
  }
  for (double t : detail::ticks(y0, y1)) {
    out += "<line x1=\"" + num(left - 5) + "\" y1=\"" + num(sy(t)) + "\" x2=\"" + num(left) + "\" y2=\"" + num(sy(t)) +
           "\" stroke=\"black\"/>";
    out += "<text x=\"" + num(left - 8) + "\" y=\"" + num(sy(t) + 4) + "\" text-anchor=\"end\">" + num(t) + "</text>\n";
  }
  out += "<text x=\"" + num(left + pw / 2) + "\" y=\"" + num(p.height - 12.0) + "\" text-anchor=\"middle\">" +
         detail::escape(p.x_label) + "</text>\n";
  out += "<text transform=\"translate(18," + num(top + ph / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
         detail::escape(p.y_label) + "</text>\n";

  for (std::size_t k = 0; k < p.series.size(); ++k) {
    const Series& s = p.series[k];
    std::string pts;
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      pts += num(sx(s.x[i])) + "," + num(sy(s.y[i])) + " ";
      if (s.markers)
        out += "<circle cx=\"" + num(sx(s.x[i])) + "\" cy=\"" + num(sy(s.y[i])) + "\" r=\"3.5\" fill=\"" +
               detail::color(k) + "\"/>\n";
    }
    out += "<polyline fill=\"none\" stroke=\"" + std::string(detail::color(k)) + "\" stroke-width=\"1.5\"";
    if (s.dashed) out += " stroke-dasharray=\"6,4\"";
    out += " points=\"" + pts + "\"/>\n";
    const double ly = top + 14 + 18.0 * k;
    out += "<line x1=\"" + num(left + pw + 12) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(left + pw + 36) + "\" y2=\"" +
           num(ly) + "\" stroke=\"" + detail::color(k) + "\" stroke-width=\"2\"/>";
    out += "<text x=\"" + num(left + pw + 42) + "\" y=\"" + num(ly + 4) + "\">" + detail::escape(s.label) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

// log10(1 - c) against log10(kappa): measured medians as markers, fitted line dashed.
inline Plot rate_plot(const SweepResult& res) {
  Plot p;
  p.title = "Empirical rate vs condition number (n = " + std::to_string(res.config.n) + ")";
  p.x_label = "log10 kappa";
  p.y_label = "log10 (1 - c)";
  for (const RateFit& f : res.fits) {
    Series pts;
    pts.label = std::string(scheme_name(f.scheme));
    pts.markers = true;
    for (std::size_t i = 0; i < f.kappas.size(); ++i) {
      pts.x.push_back(std::log10(f.kappas[i]));
      pts.y.push_back(std::log10(1.0 - f.c_emp[i]));
    }
    if (f.fit) pts.label += " (slope " + detail::num(f.fit->slope) + ")";
    const std::vector<double> xs = pts.x;
    p.series.push_back(std::move(pts));
    if (f.fit && !xs.empty()) {
      Series line;
      line.label = std::string(scheme_name(f.scheme)) + " fit";
      line.dashed = true;
      for (double x : {xs.front(), xs.back()}) {
        line.x.push_back(x);
        line.y.push_back(f.fit->intercept + f.fit->slope * x);
      }
      p.series.push_back(std::move(line));
    }
  }
  return p;
}

// log10(U - U*) against iteration for recorded rows.
inline Series convergence_series(const std::string& label, const std::vector<TraceRow>& rows) {
  Series s;
  s.label = label;
  for (const TraceRow& r : rows) {
    if (!(r.subopt > 0.0)) continue;
    s.x.push_back(static_cast<double>(r.k));
    s.y.push_back(std::log10(r.subopt));
  }
  return s;
}

inline Plot convergence_plot(std::string title, std::vector<Series> series) {
  Plot p;
  p.title = std::move(title);
  p.x_label = "iteration";
  p.y_label = "log10 (U - U*)";
  p.series = std::move(series);
  return p;
}

}  // namespace liemom::svg
