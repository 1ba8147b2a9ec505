#pragma once

// Minimal SVG plots: a complex-plane scatter with the unit circle and line
// plots with optional log-scaled y axis. CSV files remain the data of record.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "kaczmarz/linalg.hpp"

namespace kaczmarz::svg {

namespace detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

constexpr double kW = 640, kH = 480, kMargin = 60;

inline void open(std::ostream& os, const std::string& title) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
     << "\" viewBox=\"0 0 " << kW << ' ' << kH << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << kW / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"16\">"
     << title << "</text>\n";
}

}  // namespace detail

inline const std::vector<std::string>& palette() {
  static const std::vector<std::string> p{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                          "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
  return p;
}

/// Eigenvalues in the complex plane with the unit circle.
inline void eigen_scatter(std::ostream& os, const ComplexVector& ev, const std::string& title) {
  using namespace detail;
  open(os, title);
  const double cx = kW / 2, cy = (kH + 20) / 2, rad = std::min(kW, kH - 20) / 2 - kMargin / 2;
  os << "<line x1=\"" << num(cx - rad * 1.1) << "\" y1=\"" << num(cy) << "\" x2=\"" << num(cx + rad * 1.1)
     << "\" y2=\"" << num(cy) << "\" stroke=\"#999\"/>\n";
  os << "<line x1=\"" << num(cx) << "\" y1=\"" << num(cy - rad * 1.1) << "\" x2=\"" << num(cx)
     << "\" y2=\"" << num(cy + rad * 1.1) << "\" stroke=\"#999\"/>\n";
  os << "<circle cx=\"" << num(cx) << "\" cy=\"" << num(cy) << "\" r=\"" << num(rad)
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (const auto& l : ev)
    os << "<circle cx=\"" << num(cx + rad * l.real()) << "\" cy=\"" << num(cy - rad * l.imag())
       << "\" r=\"2\" fill=\"#1f77b4\"/>\n";
  os << "</svg>\n";
}

struct Series {
  std::string name;
  std::vector<double> x, y;
};

inline void line_plot(std::ostream& os, const std::vector<Series>& series, const std::string& title,
                      const std::string& xlabel, const std::string& ylabel, bool log_y) {
  using namespace detail;
  open(os, title);
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  auto ty = [&](double v) { return log_y ? std::log10(v) : v; };
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (log_y && !(s.y[i] > 0.0)) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  if (!(x1 > x0)) x1 = x0 + 1;
  if (!(y1 > y0)) y1 = y0 + 1;
  if (!std::isfinite(x0) || !std::isfinite(y0)) {
    x0 = 0; x1 = 1; y0 = 0; y1 = 1;
  }
  const double pw = kW - 2 * kMargin, ph = kH - 2 * kMargin;
  auto px = [&](double v) { return kMargin + (v - x0) / (x1 - x0) * pw; };
  auto py = [&](double v) { return kH - kMargin - (ty(v) - y0) / (y1 - y0) * ph; };

  os << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  os << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 15 << "\" text-anchor=\"middle\" "
        "font-family=\"sans-serif\" font-size=\"13\">" << xlabel << "</text>\n";
  os << "<text x=\"15\" y=\"" << kH / 2 << "\" transform=\"rotate(-90 15 " << kH / 2
     << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << ylabel
     << (log_y ? " (log10)" : "") << "</text>\n";
  for (int t = 0; t <= 4; ++t) {
    const double fx = x0 + (x1 - x0) * t / 4, fy = y0 + (y1 - y0) * t / 4;
    const double sx = kMargin + pw * t / 4, sy = kH - kMargin - ph * t / 4;
    os << "<text x=\"" << num(sx) << "\" y=\"" << kH - kMargin + 16
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << label(fx)
       << "</text>\n";
    os << "<text x=\"" << kMargin - 6 << "\" y=\"" << num(sy + 4)
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << label(fy)
       << "</text>\n";
  }
  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& colour = palette()[s % palette().size()];
    os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.2\" points=\"";
    for (std::size_t i = 0; i < series[s].x.size(); ++i) {
      if (log_y && !(series[s].y[i] > 0.0)) continue;
      os << num(px(series[s].x[i])) << ',' << num(py(series[s].y[i])) << ' ';
    }
    os << "\"/>\n";
    if (series.size() <= 8 && !series[s].name.empty())
      os << "<text x=\"" << kW - kMargin - 4 << "\" y=\"" << kMargin + 14 + 14 * static_cast<double>(s)
         << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" << colour
         << "\">" << series[s].name << "</text>\n";
  }
  os << "</svg>\n";
}

}  // namespace kaczmarz::svg
