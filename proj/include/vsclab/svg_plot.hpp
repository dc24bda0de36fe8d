#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vsclab {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  /// Draw markers only (no connecting line).
  bool markersOnly = false;
};

/// Static SVG 1.1 line plot on log-log axes. Non-positive points are skipped;
/// a series with a single point is drawn as one marker.
void writeLogLogSvg(std::ostream& out, const std::string& title, const std::string& xLabel,
                    const std::string& yLabel, const std::vector<PlotSeries>& series);

}  // namespace vsclab
