#pragma once

#include <string>
#include <vector>

namespace rdlab {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool markers_only = false; // scatter instead of a line
};

struct PlotSpec {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  std::vector<PlotSeries> series;
};

/// Minimal deterministic SVG line/scatter plot: fixed canvas, 1-2-5 ticks,
/// no external dependencies. Identical input produces identical bytes.
void write_svg_plot(const std::string& path, const PlotSpec& spec);

} // namespace rdlab
