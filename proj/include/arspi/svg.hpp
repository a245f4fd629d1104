#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace arspi {

struct PlotSeries {
    std::string name;
    std::string color;        // any SVG color string
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotOptions {
    std::string title;
    std::string x_label;
    std::string y_label;
    int width = 960;
    int height = 420;
    // Horizontal guide lines (e.g. drought thresholds), drawn dashed.
    std::vector<double> guides;
};

// Minimal self-contained SVG line plot: axes, ticks, optional guides, one
// polyline per series, legend. Enough for trace, index, and ACF plots.
void write_line_plot_svg(std::ostream& out, std::span<const PlotSeries> series,
                         const PlotOptions& options);

}  // namespace arspi
