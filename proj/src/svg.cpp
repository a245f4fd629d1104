#include "arspi/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>

#include "arspi/errors.hpp"

namespace arspi {

namespace {

struct Range {
    double lo = 0.0;
    double hi = 1.0;
};

Range axis_range(double lo, double hi) {
    if (!(lo <= hi)) return {0.0, 1.0};
    if (lo == hi) return {lo - 0.5, hi + 0.5};
    const double pad = 0.05 * (hi - lo);
    return {lo - pad, hi + pad};
}

// Round tick step to a 1/2/5 decade multiple.
double tick_step(const Range& r, int target_ticks) {
    const double raw = (r.hi - r.lo) / target_ticks;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (const double m : {1.0, 2.0, 5.0, 10.0})
        if (raw <= m * mag) return m * mag;
    return 10.0 * mag;
}

std::string fmt(double v) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%g", v);
    return buffer;
}

std::string escape(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (const char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

void write_line_plot_svg(std::ostream& out, std::span<const PlotSeries> series,
                         const PlotOptions& options) {
    if (series.empty()) throw DomainError("write_line_plot_svg: no series");
    double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
    double y_lo = x_lo, y_hi = -x_lo;
    for (const PlotSeries& s : series) {
        if (s.x.size() != s.y.size())
            throw DomainError("write_line_plot_svg: x/y length mismatch in series " + s.name);
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            x_lo = std::min(x_lo, s.x[i]);
            x_hi = std::max(x_hi, s.x[i]);
            y_lo = std::min(y_lo, s.y[i]);
            y_hi = std::max(y_hi, s.y[i]);
        }
    }
    for (const double g : options.guides) {
        y_lo = std::min(y_lo, g);
        y_hi = std::max(y_hi, g);
    }
    const Range xr = axis_range(x_lo, x_hi);
    const Range yr = axis_range(y_lo, y_hi);

    const double margin_left = 64, margin_right = 16, margin_top = 40, margin_bottom = 48;
    const double w = options.width, h = options.height;
    const double plot_w = w - margin_left - margin_right;
    const double plot_h = h - margin_top - margin_bottom;
    const auto sx = [&](double x) { return margin_left + (x - xr.lo) / (xr.hi - xr.lo) * plot_w; };
    const auto sy = [&](double y) { return margin_top + (yr.hi - y) / (yr.hi - yr.lo) * plot_h; };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
        << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << w / 2 << "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\""
        << " font-size=\"14\">" << escape(options.title) << "</text>\n";

    // Axes, ticks, labels.
    out << "<g stroke=\"#444\" stroke-width=\"1\" font-family=\"sans-serif\" font-size=\"11\">\n";
    out << "<line x1=\"" << margin_left << "\" y1=\"" << margin_top + plot_h << "\" x2=\""
        << margin_left + plot_w << "\" y2=\"" << margin_top + plot_h << "\"/>\n";
    out << "<line x1=\"" << margin_left << "\" y1=\"" << margin_top << "\" x2=\"" << margin_left
        << "\" y2=\"" << margin_top + plot_h << "\"/>\n";
    const double xstep = tick_step(xr, 8);
    for (double x = std::ceil(xr.lo / xstep) * xstep; x <= xr.hi + 1e-9 * xstep; x += xstep) {
        out << "<line x1=\"" << sx(x) << "\" y1=\"" << margin_top + plot_h << "\" x2=\"" << sx(x)
            << "\" y2=\"" << margin_top + plot_h + 4 << "\"/>\n"
            << "<text x=\"" << sx(x) << "\" y=\"" << margin_top + plot_h + 16
            << "\" text-anchor=\"middle\" stroke=\"none\" fill=\"#222\">" << fmt(x) << "</text>\n";
    }
    const double ystep = tick_step(yr, 6);
    for (double y = std::ceil(yr.lo / ystep) * ystep; y <= yr.hi + 1e-9 * ystep; y += ystep) {
        out << "<line x1=\"" << margin_left - 4 << "\" y1=\"" << sy(y) << "\" x2=\"" << margin_left
            << "\" y2=\"" << sy(y) << "\"/>\n"
            << "<text x=\"" << margin_left - 8 << "\" y=\"" << sy(y) + 4
            << "\" text-anchor=\"end\" stroke=\"none\" fill=\"#222\">" << fmt(y) << "</text>\n";
    }
    out << "<text x=\"" << margin_left + plot_w / 2 << "\" y=\"" << h - 8
        << "\" text-anchor=\"middle\" stroke=\"none\" fill=\"#222\">" << escape(options.x_label)
        << "</text>\n";
    out << "<text x=\"14\" y=\"" << margin_top + plot_h / 2
        << "\" text-anchor=\"middle\" stroke=\"none\" fill=\"#222\" transform=\"rotate(-90 14 "
        << margin_top + plot_h / 2 << ")\">" << escape(options.y_label) << "</text>\n";
    out << "</g>\n";

    for (const double g : options.guides) {
        out << "<line x1=\"" << margin_left << "\" y1=\"" << sy(g) << "\" x2=\""
            << margin_left + plot_w << "\" y2=\"" << sy(g)
            << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
    }

    for (const PlotSeries& s : series) {
        out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.2\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            out << sx(s.x[i]) << ',' << sy(s.y[i]) << ' ';
        }
        out << "\"/>\n";
    }

    double legend_y = margin_top + 6;
    for (const PlotSeries& s : series) {
        out << "<rect x=\"" << margin_left + plot_w - 150 << "\" y=\"" << legend_y - 8
            << "\" width=\"12\" height=\"3\" fill=\"" << s.color << "\"/>\n"
            << "<text x=\"" << margin_left + plot_w - 132 << "\" y=\"" << legend_y
            << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#222\">" << escape(s.name)
            << "</text>\n";
        legend_y += 16;
    }
    out << "</svg>\n";
}

}  // namespace arspi
