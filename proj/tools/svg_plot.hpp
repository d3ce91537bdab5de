#pragma once

#include <string>
#include <vector>

struct PlotLine {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;  // NaN breaks the line
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotLine> lines;
};

/// Static line chart with fixed styling. Returns false when the file cannot
/// be written.
bool write_svg(const std::string& path, const PlotSpec& spec);
