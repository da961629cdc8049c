#include "tropgrad/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "tropgrad/error.hpp"

namespace tropgrad {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
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
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string ecdf_svg(const std::vector<EcdfSeries>& series, const SvgOptions& o) {
  if (o.width < 200 || o.height < 150) throw InvalidInput("ecdf_svg: canvas too small");
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      if (!std::isfinite(x)) continue;
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  }
  if (!std::isfinite(lo)) lo = -1.0, hi = 0.0;
  lo = std::floor(lo);
  hi = std::ceil(hi);
  if (hi <= lo) hi = lo + 1.0;

  const double left = 60, right = 150, top = 30, bottom = 50;
  const double pw = o.width - left - right, ph = o.height - top - bottom;
  auto px = [&](double x) { return left + (x - lo) / (hi - lo) * pw; };
  auto py = [&](double y) { return top + (1.0 - y) * ph; };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(o.width) + "\" height=\"" +
       std::to_string(o.height) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!o.title.empty()) {
    s += "<text x=\"" + num(left + pw / 2) + "\" y=\"18\" text-anchor=\"middle\" font-size=\"13\">" + escape(o.title) +
         "</text>\n";
  }
  s += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) +
       "\" fill=\"none\" stroke=\"black\"/>\n";

  const double span = hi - lo;
  const double step = span <= 10 ? 1.0 : std::ceil(span / 10.0);
  for (double x = lo; x <= hi + 1e-9; x += step) {
    s += "<line x1=\"" + num(px(x)) + "\" y1=\"" + num(top + ph) + "\" x2=\"" + num(px(x)) + "\" y2=\"" +
         num(top + ph + 4) + "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + num(px(x)) + "\" y=\"" + num(top + ph + 16) + "\" text-anchor=\"middle\">" +
         std::to_string(static_cast<long>(x)) + "</text>\n";
  }
  for (int i = 0; i <= 4; ++i) {
    const double y = i / 4.0;
    s += "<line x1=\"" + num(left - 4) + "\" y1=\"" + num(py(y)) + "\" x2=\"" + num(left) + "\" y2=\"" + num(py(y)) +
         "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + num(left - 7) + "\" y=\"" + num(py(y) + 4) + "\" text-anchor=\"end\">" + num(y) + "</text>\n";
  }
  s += "<text x=\"" + num(left + pw / 2) + "\" y=\"" + num(o.height - 12.0) + "\" text-anchor=\"middle\">" +
       escape(o.x_label) + "</text>\n";
  s += "<text transform=\"translate(16," + num(top + ph / 2) +
       ") rotate(-90)\" text-anchor=\"middle\">cumulative fraction</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kPalette[i % std::size(kPalette)];
    std::string pts = num(px(lo)) + "," + num(py(0.0));
    double prev_y = 0.0;
    for (const auto& [x, y] : series[i].points) {
      if (!std::isfinite(x)) continue;
      pts += " " + num(px(x)) + "," + num(py(prev_y)) + " " + num(px(x)) + "," + num(py(y));
      prev_y = y;
    }
    pts += " " + num(px(hi)) + "," + num(py(prev_y));
    s += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\" points=\"" + pts +
         "\"/>\n";
    const double ly = top + 10 + 16.0 * static_cast<double>(i);
    s += "<line x1=\"" + num(left + pw + 12) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(left + pw + 32) + "\" y2=\"" +
         num(ly) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    s += "<text x=\"" + num(left + pw + 38) + "\" y=\"" + num(ly + 4) + "\">" + escape(series[i].name) + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace tropgrad
