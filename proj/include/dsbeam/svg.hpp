#ifndef DSBEAM_SVG_HPP
#define DSBEAM_SVG_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "dsbeam/beamformer.hpp"
#include "dsbeam/export.hpp"
#include "dsbeam/metrics.hpp"

namespace dsbeam {

enum class HeatmapMetric { area_difference, rmse_percent };

namespace detail {

inline std::string fmt_coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

// Ordered purple-to-red scale; min maps to the purple end, max to red.
inline std::string palette_color(double t) {
    static constexpr std::array<std::array<int, 3>, 5> stops{{
        {68, 1, 84},     // purple
        {140, 41, 129},  // magenta
        {196, 85, 111},  // salmon
        {230, 140, 70},  // orange
        {215, 25, 28},   // red
    }};
    t = std::clamp(t, 0.0, 1.0);
    const double pos = t * (stops.size() - 1);
    const std::size_t i = std::min(static_cast<std::size_t>(pos), stops.size() - 2);
    const double u = pos - static_cast<double>(i);
    char buf[16];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x",
                  static_cast<int>(std::lround(stops[i][0] + u * (stops[i + 1][0] - stops[i][0]))),
                  static_cast<int>(std::lround(stops[i][1] + u * (stops[i + 1][1] - stops[i][1]))),
                  static_cast<int>(std::lround(stops[i][2] + u * (stops[i + 1][2] - stops[i][2]))));
    return buf;
}

inline std::string polyline_points(const SteeringGrid& grid, const std::vector<double>& values,
                                   double x0, double y0, double w, double h) {
    std::string pts;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = x0 + grid[i] / 360.0 * w;
        const double y = y0 + (1.0 - values[i]) * h;
        pts += fmt_coord(x);
        pts += ',';
        pts += fmt_coord(y);
        if (i + 1 < grid.size()) pts += ' ';
    }
    return pts;
}

}  // namespace detail

/// Overlay of theoretical and experimental beam patterns with a marker at the
/// true source azimuth. Output is deterministic for identical inputs.
inline std::string emit_beam_pattern_svg(const BeamPattern& theoretical,
                                         const BeamPattern& experimental, double true_azimuth_deg) {
    if (!(theoretical.grid == experimental.grid))
        fail(errc::shape_error, "beam patterns have different grids");

    constexpr double width = 860, height = 520;
    constexpr double x0 = 70, y0 = 40, plot_w = 720, plot_h = 400;
    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
         detail::fmt_coord(width) + "\" height=\"" + detail::fmt_coord(height) +
         "\" viewBox=\"0 0 860 520\">\n";
    s += "<rect x=\"0\" y=\"0\" width=\"860\" height=\"520\" fill=\"white\"/>\n";

    // axes and grid lines
    s += "<g id=\"axes\" stroke=\"#cccccc\" stroke-width=\"1\" font-family=\"sans-serif\" "
         "font-size=\"12\" fill=\"black\">\n";
    for (int a = 0; a <= 360; a += 60) {
        const double x = x0 + a / 360.0 * plot_w;
        s += "<line x1=\"" + detail::fmt_coord(x) + "\" y1=\"" + detail::fmt_coord(y0) +
             "\" x2=\"" + detail::fmt_coord(x) + "\" y2=\"" + detail::fmt_coord(y0 + plot_h) +
             "\"/>\n";
        s += "<text x=\"" + detail::fmt_coord(x - 10) + "\" y=\"" +
             detail::fmt_coord(y0 + plot_h + 18) + "\" stroke=\"none\">" + std::to_string(a) +
             "</text>\n";
    }
    for (int i = 0; i <= 5; ++i) {
        const double v = i * 0.2;
        const double y = y0 + (1.0 - v) * plot_h;
        s += "<line x1=\"" + detail::fmt_coord(x0) + "\" y1=\"" + detail::fmt_coord(y) +
             "\" x2=\"" + detail::fmt_coord(x0 + plot_w) + "\" y2=\"" + detail::fmt_coord(y) +
             "\"/>\n";
        char lbl[8];
        std::snprintf(lbl, sizeof lbl, "%.1f", v);
        s += "<text x=\"" + detail::fmt_coord(x0 - 34) + "\" y=\"" + detail::fmt_coord(y + 4) +
             "\" stroke=\"none\">" + lbl + "</text>\n";
    }
    s += "<text x=\"" + detail::fmt_coord(x0 + plot_w / 2 - 60) + "\" y=\"" +
         detail::fmt_coord(y0 + plot_h + 44) + "\" stroke=\"none\">steering angle (deg)</text>\n";
    s += "<text x=\"16\" y=\"" + detail::fmt_coord(y0 + plot_h / 2) +
         "\" stroke=\"none\" transform=\"rotate(-90 16 " + detail::fmt_coord(y0 + plot_h / 2) +
         ")\">normalized power</text>\n";
    s += "</g>\n";

    // source direction marker
    const double xs = x0 + true_azimuth_deg / 360.0 * plot_w;
    s += "<g id=\"source-angle\">\n<line x1=\"" + detail::fmt_coord(xs) + "\" y1=\"" +
         detail::fmt_coord(y0) + "\" x2=\"" + detail::fmt_coord(xs) + "\" y2=\"" +
         detail::fmt_coord(y0 + plot_h) + "\" stroke=\"black\" stroke-width=\"1.5\"/>\n</g>\n";

    s += "<g id=\"theoretical\">\n<polyline fill=\"none\" stroke=\"#1f4fd1\" stroke-width=\"2\" "
         "points=\"" +
         detail::polyline_points(theoretical.grid, theoretical.values, x0, y0, plot_w, plot_h) +
         "\"/>\n</g>\n";
    s += "<g id=\"experimental\">\n<polyline fill=\"none\" stroke=\"#00b7c2\" stroke-width=\"2\" "
         "stroke-dasharray=\"6 4\" points=\"" +
         detail::polyline_points(experimental.grid, experimental.values, x0, y0, plot_w, plot_h) +
         "\"/>\n</g>\n";

    // legend
    s += "<g id=\"legend\" font-family=\"sans-serif\" font-size=\"13\">\n";
    s += "<line x1=\"600\" y1=\"20\" x2=\"630\" y2=\"20\" stroke=\"#1f4fd1\" stroke-width=\"2\"/>"
         "<text x=\"636\" y=\"24\">theoretical</text>\n";
    s += "<line x1=\"600\" y1=\"34\" x2=\"630\" y2=\"34\" stroke=\"#00b7c2\" stroke-width=\"2\" "
         "stroke-dasharray=\"6 4\"/><text x=\"636\" y=\"38\">experimental</text>\n";
    s += "<line x1=\"460\" y1=\"20\" x2=\"490\" y2=\"20\" stroke=\"black\" stroke-width=\"1.5\"/>"
         "<text x=\"496\" y=\"24\">source angle</text>\n";
    s += "</g>\n</svg>\n";
    return s;
}

/// Array-angle x frequency heatmap of one comparison metric, colored on the
/// purple-to-red scale with a colorbar.
inline std::string emit_heatmap_svg(const HeatmapGrid& grid, HeatmapMetric metric) {
    const auto& angles = grid.array_angles_deg();
    const auto& freqs = grid.frequencies_hz();
    auto value_of = [&](std::size_t ai, std::size_t fi) {
        const auto& c = grid.at(ai, fi);
        return metric == HeatmapMetric::area_difference ? c.area_difference : c.rmse_percent;
    };

    double vmin = value_of(0, 0), vmax = vmin;
    for (std::size_t ai = 0; ai < angles.size(); ++ai)
        for (std::size_t fi = 0; fi < freqs.size(); ++fi) {
            vmin = std::min(vmin, value_of(ai, fi));
            vmax = std::max(vmax, value_of(ai, fi));
        }
    const double range = vmax - vmin;

    constexpr double x0 = 90, y0 = 50, cell_w = 26, cell_h = 18;
    const double plot_w = cell_w * static_cast<double>(freqs.size());
    const double plot_h = cell_h * static_cast<double>(angles.size());
    const double width = x0 + plot_w + 140;
    const double height = y0 + plot_h + 70;

    const char* title = metric == HeatmapMetric::area_difference ? "normalized area difference"
                                                                 : "RMSE (percent)";
    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
         detail::fmt_coord(width) + "\" height=\"" + detail::fmt_coord(height) +
         "\" viewBox=\"0 0 " + detail::fmt_coord(width) + " " + detail::fmt_coord(height) +
         "\">\n";
    s += "<rect x=\"0\" y=\"0\" width=\"" + detail::fmt_coord(width) + "\" height=\"" +
         detail::fmt_coord(height) + "\" fill=\"white\"/>\n";
    s += "<text x=\"" + detail::fmt_coord(x0) + "\" y=\"28\" font-family=\"sans-serif\" "
         "font-size=\"15\">" + std::string(title) + "</text>\n";

    s += "<g id=\"cells\">\n";
    for (std::size_t ai = 0; ai < angles.size(); ++ai) {
        for (std::size_t fi = 0; fi < freqs.size(); ++fi) {
            const double t = range > 0.0 ? (value_of(ai, fi) - vmin) / range : 0.0;
            const double x = x0 + cell_w * static_cast<double>(fi);
            const double y = y0 + cell_h * static_cast<double>(ai);
            s += "<rect class=\"cell\" x=\"" + detail::fmt_coord(x) + "\" y=\"" +
                 detail::fmt_coord(y) + "\" width=\"" + detail::fmt_coord(cell_w) +
                 "\" height=\"" + detail::fmt_coord(cell_h) + "\" fill=\"" +
                 detail::palette_color(t) + "\"/>\n";
        }
    }
    s += "</g>\n";

    // axis labels
    s += "<g id=\"axis-labels\" font-family=\"sans-serif\" font-size=\"11\">\n";
    for (std::size_t ai = 0; ai < angles.size(); ++ai) {
        s += "<text x=\"" + detail::fmt_coord(x0 - 8) + "\" y=\"" +
             detail::fmt_coord(y0 + cell_h * (static_cast<double>(ai) + 0.7)) +
             "\" text-anchor=\"end\">" + detail::fmt_double(angles[ai]) + "</text>\n";
    }
    for (std::size_t fi = 0; fi < freqs.size(); fi += (freqs.size() > 13 ? 2 : 1)) {
        s += "<text x=\"" + detail::fmt_coord(x0 + cell_w * (static_cast<double>(fi) + 0.5)) +
             "\" y=\"" + detail::fmt_coord(y0 + plot_h + 16) + "\" text-anchor=\"middle\">" +
             detail::fmt_double(freqs[fi]) + "</text>\n";
    }
    s += "<text x=\"" + detail::fmt_coord(x0 + plot_w / 2 - 44) + "\" y=\"" +
         detail::fmt_coord(y0 + plot_h + 40) + "\" font-size=\"13\">frequency (Hz)</text>\n";
    s += "<text x=\"20\" y=\"" + detail::fmt_coord(y0 + plot_h / 2) +
         "\" font-size=\"13\" transform=\"rotate(-90 20 " + detail::fmt_coord(y0 + plot_h / 2) +
         ")\">array angle (deg)</text>\n";
    s += "</g>\n";

    // colorbar: stacked strips from purple (min) to red (max)
    s += "<g id=\"colorbar\">\n";
    constexpr int strips = 64;
    const double bar_x = x0 + plot_w + 30, bar_h = plot_h, strip_h = bar_h / strips;
    for (int i = 0; i < strips; ++i) {
        const double t = 1.0 - (static_cast<double>(i) + 0.5) / strips;
        s += "<rect x=\"" + detail::fmt_coord(bar_x) + "\" y=\"" +
             detail::fmt_coord(y0 + i * strip_h) + "\" width=\"18\" height=\"" +
             detail::fmt_coord(strip_h + 0.5) + "\" fill=\"" + detail::palette_color(t) + "\"/>\n";
    }
    s += "<text x=\"" + detail::fmt_coord(bar_x + 24) + "\" y=\"" + detail::fmt_coord(y0 + 10) +
         "\" font-family=\"sans-serif\" font-size=\"11\">" + detail::fmt_double(vmax) +
         "</text>\n";
    s += "<text x=\"" + detail::fmt_coord(bar_x + 24) + "\" y=\"" +
         detail::fmt_coord(y0 + bar_h) + "\" font-family=\"sans-serif\" font-size=\"11\">" +
         detail::fmt_double(vmin) + "</text>\n";
    s += "</g>\n</svg>\n";
    return s;
}

}  // namespace dsbeam

#endif
