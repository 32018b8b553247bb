#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ewslab::report {

struct LineSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Axes, one polyline per series and a legend. Non-finite points are skipped.
std::string svg_line_plot(const std::string& title, const std::string& x_label,
                          const std::string& y_label, const std::vector<LineSeries>& series);

/// Cell map of a sign grid: -1 red (CSD-consistent), +1 blue (deceitful),
/// 0 white. values is row-major [row * cols.size() + col]; rows run along y.
std::string svg_sign_heatmap(const std::string& title, const std::string& x_label,
                             const std::string& y_label, const std::vector<double>& cols,
                             const std::vector<double>& rows,
                             const std::vector<std::int8_t>& values);

/// Same layout with a continuous colour ramp; log_scale maps log10(value).
std::string svg_value_heatmap(const std::string& title, const std::string& x_label,
                              const std::string& y_label, const std::vector<double>& cols,
                              const std::vector<double>& rows, const std::vector<double>& values,
                              bool log_scale);

}  // namespace ewslab::report
