#ifndef TGFL_REPORT_HPP
#define TGFL_REPORT_HPP

#include <string>
#include <vector>

#include "tgfl/geodesy.hpp"

namespace tgfl {

/// Writes content to path atomically (temp file + rename).
void write_file_atomic(const std::string& path, const std::string& content);

std::string trajectory_csv(const Trajectory& traj);

/// Simple SVG polyline plot of (t, value) series.
struct SvgSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;
};
std::string svg_plot(const std::vector<SvgSeries>& series, int width = 640, int height = 360);

std::string format_double(double v);

}  // namespace tgfl

#endif  // TGFL_REPORT_HPP
