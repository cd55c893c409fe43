#include "rdlab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "rdlab/common.hpp"
#include "rdlab/io.hpp"

namespace rdlab {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 500.0;
constexpr double kMarginL = 70.0, kMarginR = 20.0, kMarginT = 40.0, kMarginB = 55.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void include(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (!(lo <= hi)) {
      lo = 0.0;
      hi = 1.0;
    }
    if (lo == hi) {
      lo -= 0.5;
      hi += 0.5;
    } else {
      const double m = 0.05 * (hi - lo);
      lo -= m;
      hi += m;
    }
  }
};

// 1-2-5 tick spacing.
std::vector<double> ticks(const Range& r) {
  const double span = r.hi - r.lo;
  const double raw = span / 6.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double mult : {1.0, 2.0, 5.0, 10.0}) {
    if (mag * mult >= raw) {
      step = mag * mult;
      break;
    }
  }
  std::vector<double> out;
  for (double t = std::ceil(r.lo / step) * step; t <= r.hi + 1e-12 * span; t += step) {
    out.push_back(std::abs(t) < 1e-12 * span ? 0.0 : t);
  }
  return out;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

} // namespace

void write_svg_plot(const std::string& path, const PlotSpec& spec) {
  if (spec.series.empty()) throw ConfigError("svg: nothing to plot");
  Range rx, ry;
  for (const auto& s : spec.series) {
    if (s.x.size() != s.y.size()) throw ConfigError("svg: series size mismatch");
    for (double v : s.x) rx.include(v);
    for (double v : s.y) ry.include(v);
  }
  rx.pad();
  ry.pad();

  const double plot_w = kWidth - kMarginL - kMarginR;
  const double plot_h = kHeight - kMarginT - kMarginB;
  auto X = [&](double v) { return kMarginL + (v - rx.lo) / (rx.hi - rx.lo) * plot_w; };
  auto Y = [&](double v) { return kMarginT + (ry.hi - v) / (ry.hi - ry.lo) * plot_h; };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
  out << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"16\">" << escape(spec.title) << "</text>\n";

  for (double t : ticks(rx)) {
    const double px = X(t);
    out << "<line x1=\"" << fmt(px) << "\" y1=\"" << fmt(kMarginT) << "\" x2=\"" << fmt(px)
        << "\" y2=\"" << fmt(kHeight - kMarginB) << "\" stroke=\"#dddddd\"/>\n";
    out << "<text x=\"" << fmt(px) << "\" y=\"" << fmt(kHeight - kMarginB + 18)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(t)
        << "</text>\n";
  }
  for (double t : ticks(ry)) {
    const double py = Y(t);
    out << "<line x1=\"" << fmt(kMarginL) << "\" y1=\"" << fmt(py) << "\" x2=\""
        << fmt(kWidth - kMarginR) << "\" y2=\"" << fmt(py) << "\" stroke=\"#dddddd\"/>\n";
    out << "<text x=\"" << fmt(kMarginL - 8) << "\" y=\"" << fmt(py + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(t)
        << "</text>\n";
  }
  out << "<rect x=\"" << kMarginL << "\" y=\"" << kMarginT << "\" width=\"" << plot_w
      << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"black\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
      << escape(spec.xlabel) << "</text>\n";
  out << "<text x=\"16\" y=\"" << kHeight / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
      << "transform=\"rotate(-90 16 " << kHeight / 2 << ")\">" << escape(spec.ylabel)
      << "</text>\n";

  for (std::size_t si = 0; si < spec.series.size(); ++si) {
    const auto& s = spec.series[si];
    const char* color = kPalette[si % 8];
    if (s.markers_only) {
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        out << "<circle cx=\"" << fmt(X(s.x[i])) << "\" cy=\"" << fmt(Y(s.y[i]))
            << "\" r=\"3\" fill=\"" << color << "\"/>\n";
      }
    } else {
      out << "<path fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" d=\"";
      bool pen_up = true;
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
          pen_up = true;
          continue;
        }
        out << (pen_up ? 'M' : 'L') << fmt(X(s.x[i])) << ' ' << fmt(Y(s.y[i]));
        pen_up = false;
      }
      out << "\"/>\n";
    }
    if (!s.label.empty()) {
      const double ly = kMarginT + 16.0 + 16.0 * double(si);
      out << "<rect x=\"" << fmt(kWidth - kMarginR - 150) << "\" y=\"" << fmt(ly - 9)
          << "\" width=\"10\" height=\"10\" fill=\"" << color << "\"/>\n";
      out << "<text x=\"" << fmt(kWidth - kMarginR - 135) << "\" y=\"" << fmt(ly)
          << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape(s.label)
          << "</text>\n";
    }
  }
  out << "</svg>\n";
  write_text_file(path, out.str());
}

} // namespace rdlab
