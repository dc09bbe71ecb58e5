#pragma once

#include <string>
#include <utility>
#include <vector>

namespace gbc {

/// One polyline of a chart.
struct SvgSeries {
    std::string name;
    std::vector<std::pair<double, double>> points;
};

/// Minimal line chart: axes, ticks, one polyline per series, text legend.
/// No external renderer involved.
std::string render_line_chart(const std::string& title, const std::string& x_label,
                              const std::string& y_label, const std::vector<SvgSeries>& series);

void write_line_chart(const std::string& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<SvgSeries>& series);

}  // namespace gbc
