// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace uavplace::simkit {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool markers_only = false;
};

struct Plot {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;  // non-positive values are dropped
  std::vector<Series> series;
};

/// Self-contained SVG line chart with axes, ticks and a legend.
std::string render_svg(const Plot& plot);

}  // namespace uavplace::simkit
