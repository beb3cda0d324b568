#include "prosabx/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>

namespace prosabx::svg {

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 60;
constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                    "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

struct Frame {
  double x0, x1, y0, y1;
  double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
  double py(double y) const {
    return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom);
  }
};

Frame bounds(const std::vector<std::pair<double, double>>& pts) {
  Frame f{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (auto [x, y] : pts) {
    f.x0 = std::min(f.x0, x);
    f.x1 = std::max(f.x1, x);
    f.y0 = std::min(f.y0, y);
    f.y1 = std::max(f.y1, y);
  }
  if (pts.empty()) f = {0, 1, 0, 1};
  if (f.x1 == f.x0) f.x1 = f.x0 + 1;
  if (f.y1 == f.y0) f.y1 = f.y0 + 1;
  const double pad = 0.05 * (f.y1 - f.y0);
  f.y0 -= pad;
  f.y1 += pad;
  return f;
}

std::string axes(const Frame& f, const PlotLabels& labels) {
  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
       num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + num(kWidth / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" +
       escape(labels.title) + "</text>\n";
  const double bx = kLeft, by = kHeight - kBottom;
  s += "<line x1=\"" + num(bx) + "\" y1=\"" + num(by) + "\" x2=\"" + num(kWidth - kRight) +
       "\" y2=\"" + num(by) + "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + num(bx) + "\" y1=\"" + num(by) + "\" x2=\"" + num(bx) + "\" y2=\"" +
       num(kTop) + "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = f.x0 + (f.x1 - f.x0) * i / 4.0;
    const double yv = f.y0 + (f.y1 - f.y0) * i / 4.0;
    s += "<text x=\"" + num(f.px(xv)) + "\" y=\"" + num(by + 18) +
         "\" text-anchor=\"middle\" font-size=\"11\">" + tick(xv) + "</text>\n";
    s += "<text x=\"" + num(bx - 6) + "\" y=\"" + num(f.py(yv) + 4) +
         "\" text-anchor=\"end\" font-size=\"11\">" + tick(yv) + "</text>\n";
  }
  s += "<text x=\"" + num(kWidth / 2) + "\" y=\"" + num(kHeight - 16) +
       "\" text-anchor=\"middle\" font-size=\"13\">" + escape(labels.x_label) + "</text>\n";
  s += "<text x=\"18\" y=\"" + num(kHeight / 2) + "\" text-anchor=\"middle\" font-size=\"13\" " +
       "transform=\"rotate(-90 18 " + num(kHeight / 2) + ")\">" + escape(labels.y_label) +
       "</text>\n";
  return s;
}

}  // namespace

std::string line_plot(const std::vector<Series>& series, const PlotLabels& labels) {
  std::vector<std::pair<double, double>> all;
  for (const auto& s : series) all.insert(all.end(), s.points.begin(), s.points.end());
  const Frame f = bounds(all);
  std::string out = axes(f, labels);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* color = kPalette[k % std::size(kPalette)];
    std::string pts;
    for (auto [x, y] : series[k].points) pts += num(f.px(x)) + "," + num(f.py(y)) + " ";
    out += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
           "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    out += "<text x=\"" + num(kWidth - kRight - 4) + "\" y=\"" + num(kTop + 14.0 * (k + 1)) +
           "\" text-anchor=\"end\" font-size=\"11\" fill=\"" + color + "\">" +
           escape(series[k].label) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

std::string scatter_plot(const std::vector<std::pair<double, double>>& points,
                         const std::vector<std::string>& names, const PlotLabels& labels,
                         bool identity_line) {
  Frame f = bounds(points);
  if (identity_line) {
    const double lo = std::min(f.x0, f.y0), hi = std::max(f.x1, f.y1);
    f = {lo, hi, lo, hi};
  }
  std::string out = axes(f, labels);
  if (identity_line)
    out += "<line x1=\"" + num(f.px(f.x0)) + "\" y1=\"" + num(f.py(f.x0)) + "\" x2=\"" +
           num(f.px(f.x1)) + "\" y2=\"" + num(f.py(f.x1)) +
           "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto [x, y] = points[i];
    out += "<circle cx=\"" + num(f.px(x)) + "\" cy=\"" + num(f.py(y)) +
           "\" r=\"3.5\" fill=\"#1f77b4\"/>\n";
    if (i < names.size())
      out += "<text x=\"" + num(f.px(x) + 5) + "\" y=\"" + num(f.py(y) - 5) +
             "\" font-size=\"10\">" + escape(names[i]) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace prosabx::svg
