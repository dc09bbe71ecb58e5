#include "gbc/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "gbc/errors.hpp"

namespace gbc {

namespace {

constexpr int kWidth = 800;
constexpr int kHeight = 560;
constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 20;
constexpr int kMarginTop = 40;
constexpr int kMarginBottom = 50;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

}  // namespace

std::string render_line_chart(const std::string& title, const std::string& x_label,
                              const std::string& y_label, const std::vector<SvgSeries>& series) {
    double xmin = std::numeric_limits<double>::infinity();
    double xmax = -xmin, ymin = xmin, ymax = -xmin;
    for (const auto& s : series) {
        for (const auto& [x, y] : s.points) {
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    }
    if (!(xmin <= xmax) || !(ymin <= ymax)) {
        throw ValidationError("chart needs at least one data point");
    }
    if (xmax == xmin) xmax = xmin + 1.0;
    if (ymax == ymin) ymax = ymin + 1.0;

    const double plot_w = kWidth - kMarginLeft - kMarginRight;
    const double plot_h = kHeight - kMarginTop - kMarginBottom;
    const auto px = [&](double x) { return kMarginLeft + (x - xmin) / (xmax - xmin) * plot_w; };
    const auto py = [&](double y) { return kMarginTop + (ymax - y) / (ymax - ymin) * plot_h; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
        << title << "</text>\n";

    // Axes.
    svg << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop << "\" x2=\"" << kMarginLeft
        << "\" y2=\"" << (kHeight - kMarginBottom) << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << kMarginLeft << "\" y1=\"" << (kHeight - kMarginBottom) << "\" x2=\""
        << (kWidth - kMarginRight) << "\" y2=\"" << (kHeight - kMarginBottom)
        << "\" stroke=\"black\"/>\n";

    for (int t = 0; t <= 5; ++t) {
        const double fx = xmin + (xmax - xmin) * t / 5.0;
        const double fy = ymin + (ymax - ymin) * t / 5.0;
        svg << "<line x1=\"" << px(fx) << "\" y1=\"" << (kHeight - kMarginBottom) << "\" x2=\""
            << px(fx) << "\" y2=\"" << (kHeight - kMarginBottom + 5) << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << px(fx) << "\" y=\"" << (kHeight - kMarginBottom + 18)
            << "\" text-anchor=\"middle\" font-size=\"11\">" << fmt(fx) << "</text>\n";
        svg << "<line x1=\"" << (kMarginLeft - 5) << "\" y1=\"" << py(fy) << "\" x2=\""
            << kMarginLeft << "\" y2=\"" << py(fy) << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << (kMarginLeft - 8) << "\" y=\"" << (py(fy) + 4)
            << "\" text-anchor=\"end\" font-size=\"11\">" << fmt(fy) << "</text>\n";
    }
    svg << "<text x=\"" << (kMarginLeft + plot_w / 2) << "\" y=\"" << (kHeight - 12)
        << "\" text-anchor=\"middle\" font-size=\"13\">" << x_label << "</text>\n";
    svg << "<text x=\"16\" y=\"" << (kMarginTop + plot_h / 2)
        << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
        << (kMarginTop + plot_h / 2) << ")\">" << y_label << "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& [x, y] : series[s].points) {
            svg << fmt(px(x)) << "," << fmt(py(y)) << " ";
        }
        svg << "\"/>\n";
        svg << "<text x=\"" << (kWidth - kMarginRight - 150) << "\" y=\""
            << (kMarginTop + 16 + 16 * static_cast<int>(s)) << "\" font-size=\"12\" fill=\""
            << color << "\">" << series[s].name << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

void write_line_chart(const std::string& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<SvgSeries>& series) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open " + path + " for writing");
    }
    out << render_line_chart(title, x_label, y_label, series);
}

}  // namespace gbc
