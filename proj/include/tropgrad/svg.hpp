#pragma once

// Minimal SVG emitter for ECDF plots. The x axis is the log error itself, so
// equal spacing means equal ratios of the underlying error.

#include <string>
#include <utility>
#include <vector>

namespace tropgrad {

struct EcdfSeries {
  std::string name;
  std::vector<std::pair<double, double>> points;  // (log error, cumulative fraction), sorted by x
};

struct SvgOptions {
  std::string title;
  std::string x_label = "log relative error";
  int width = 640;
  int height = 420;
};

/// Step-function polylines, one per series, with a legend. Output depends
/// only on the inputs (fixed number formatting), so it is byte-reproducible.
std::string ecdf_svg(const std::vector<EcdfSeries>& series, const SvgOptions& options = {});

}  // namespace tropgrad
