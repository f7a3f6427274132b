#ifndef DSBEAM_EXPORT_HPP
#define DSBEAM_EXPORT_HPP

#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "dsbeam/beamformer.hpp"
#include "dsbeam/metrics.hpp"

namespace dsbeam {

namespace detail {

// Fixed-format float text; keeps CSV/SVG output byte-deterministic.
inline std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

}  // namespace detail

inline std::string beam_pattern_csv(const BeamPattern& p) {
    std::string out = "angle_deg,value\n";
    for (std::size_t i = 0; i < p.grid.size(); ++i) {
        out += detail::fmt_double(p.grid[i]);
        out += ',';
        out += detail::fmt_double(p.values[i]);
        out += '\n';
    }
    return out;
}

inline nlohmann::json beam_pattern_json(const BeamPattern& p) {
    nlohmann::json j{{"angles_deg", p.grid.angles()}, {"values", p.values}};
    if (p.frequency_hz) j["frequency_hz"] = *p.frequency_hz;
    if (p.source_azimuth_deg) j["source_azimuth_deg"] = *p.source_azimuth_deg;
    return j;
}

inline BeamPattern beam_pattern_from_json(const nlohmann::json& j) {
    BeamPattern p{SteeringGrid(j.at("angles_deg").get<std::vector<double>>()),
                  j.at("values").get<std::vector<double>>(), std::nullopt, std::nullopt};
    if (p.values.size() != p.grid.size())
        fail(errc::shape_error, "values length does not match grid");
    if (j.contains("frequency_hz")) p.frequency_hz = j.at("frequency_hz").get<double>();
    if (j.contains("source_azimuth_deg"))
        p.source_azimuth_deg = j.at("source_azimuth_deg").get<double>();
    return p;
}

/// Long-form rows, one per (array angle, frequency) cell.
inline std::string heatmap_csv(const HeatmapGrid& g) {
    std::string out = "array_angle_deg,frequency_hz,area_difference,rmse_percent,peak_delta_deg\n";
    for (std::size_t ai = 0; ai < g.array_angles_deg().size(); ++ai)
        for (std::size_t fi = 0; fi < g.frequencies_hz().size(); ++fi) {
            const auto& c = g.at(ai, fi);
            out += detail::fmt_double(g.array_angles_deg()[ai]);
            out += ',';
            out += detail::fmt_double(g.frequencies_hz()[fi]);
            out += ',';
            out += detail::fmt_double(c.area_difference);
            out += ',';
            out += detail::fmt_double(c.rmse_percent);
            out += ',';
            out += detail::fmt_double(c.peak_delta_deg);
            out += '\n';
        }
    return out;
}

inline nlohmann::json heatmap_json(const HeatmapGrid& g) {
    nlohmann::json cells = nlohmann::json::array();
    for (std::size_t ai = 0; ai < g.array_angles_deg().size(); ++ai)
        for (std::size_t fi = 0; fi < g.frequencies_hz().size(); ++fi) {
            const auto& c = g.at(ai, fi);
            cells.push_back({{"array_angle_deg", g.array_angles_deg()[ai]},
                             {"frequency_hz", g.frequencies_hz()[fi]},
                             {"area_difference", c.area_difference},
                             {"rmse_percent", c.rmse_percent},
                             {"peak_delta_deg", c.peak_delta_deg}});
        }
    return nlohmann::json{{"array_angles_deg", g.array_angles_deg()},
                          {"frequencies_hz", g.frequencies_hz()},
                          {"cells", std::move(cells)}};
}

inline HeatmapGrid heatmap_from_json(const nlohmann::json& j) {
    std::vector<HeatmapCell> cells;
    for (const auto& c : j.at("cells")) {
        HeatmapCell cell;
        cell.array_angle_deg = c.at("array_angle_deg").get<double>();
        cell.frequency_hz = c.at("frequency_hz").get<double>();
        cell.result.area_difference = c.at("area_difference").get<double>();
        cell.result.rmse_percent = c.at("rmse_percent").get<double>();
        cell.result.peak_delta_deg = c.at("peak_delta_deg").get<double>();
        cells.push_back(cell);
    }
    return build_heatmap(cells);
}

}  // namespace dsbeam

#endif
