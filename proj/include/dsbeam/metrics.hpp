#ifndef DSBEAM_METRICS_HPP
#define DSBEAM_METRICS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "dsbeam/beamformer.hpp"
#include "dsbeam/error.hpp"

namespace dsbeam {

/// Agreement between two beam patterns of one (array angle, frequency) cell.
struct ComparisonResult {
    double peak_delta_deg = 0.0;    // mirror-aware circular peak difference
    double area_difference = 0.0;   // mean |a - b|, in [0, 1]
    double rmse_percent = 0.0;      // 100 sqrt(mean((a - b)^2))
};

/// Grid angle of the maximum value; ties resolve to the smallest angle.
inline double peak_angle(const BeamPattern& p) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < p.values.size(); ++i)
        if (p.values[i] > p.values[best]) best = i;
    return p.grid[best];
}

namespace detail {

inline void require_same_grid(const BeamPattern& a, const BeamPattern& b) {
    if (!(a.grid == b.grid)) fail(errc::shape_error, "beam patterns have different grids");
}

inline double circular_diff_deg(double a, double b) {
    double d = std::fmod(std::abs(a - b), 360.0);
    return d > 180.0 ? 360.0 - d : d;
}

}  // namespace detail

/// Smallest circular difference between two azimuths after folding together
/// the mirror directions a ULA cannot tell apart (theta and 180 - theta).
inline double mirror_aware_peak_delta(double a_deg, double b_deg) {
    const double d1 = detail::circular_diff_deg(a_deg, b_deg);
    const double d2 = detail::circular_diff_deg(a_deg, 180.0 - b_deg);
    return std::min(d1, d2);
}

/// Mean absolute difference of two max-normalized patterns on the same grid.
inline double area_difference(const BeamPattern& a, const BeamPattern& b) {
    detail::require_same_grid(a, b);
    double acc = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) acc += std::abs(a.values[i] - b.values[i]);
    return acc / static_cast<double>(a.values.size());
}

/// Root mean square error between two patterns, as percent of the [0, 1] scale.
inline double rmse(const BeamPattern& a, const BeamPattern& b) {
    detail::require_same_grid(a, b);
    double acc = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        const double d = a.values[i] - b.values[i];
        acc += d * d;
    }
    return 100.0 * std::sqrt(acc / static_cast<double>(a.values.size()));
}

inline ComparisonResult compare_patterns(const BeamPattern& reference, const BeamPattern& measured) {
    ComparisonResult r;
    r.peak_delta_deg = mirror_aware_peak_delta(peak_angle(reference), peak_angle(measured));
    r.area_difference = area_difference(reference, measured);
    r.rmse_percent = rmse(reference, measured);
    return r;
}

/// SNR improvement of the steered array output over a single sensor,
/// Array Gain = SNR_array / SNR_sensor. `noisy` must be `clean` plus noise;
/// both SNRs use the same analysis span as beam_pattern.
inline double array_gain(const MultichannelRecording& clean, const MultichannelRecording& noisy,
                         const ArrayGeometry& geometry, double steer_deg) {
    clean.validate();
    noisy.validate();
    if (clean.channel_count() != noisy.channel_count() || clean.frames() != noisy.frames() ||
        clean.sample_rate_hz != noisy.sample_rate_hz)
        fail(errc::shape_error, "clean and noisy recordings must have identical shape");
    if (clean.channel_count() != geometry.size())
        fail(errc::shape_error, "recording channel count must match element count");

    const std::size_t n = clean.frames();
    const std::size_t edge = detail::edge_exclusion(clean.sample_rate_hz);
    if (n <= 2 * edge) fail(errc::degenerate_signal, "recording shorter than the analysis span");
    const std::size_t lo = edge, hi = n - edge;

    auto span_power = [&](const std::vector<double>& x) { return detail::mean_power(x, lo, hi); };
    auto diff_power = [&](const std::vector<double>& a, const std::vector<double>& b) {
        double acc = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
            const double d = a[i] - b[i];
            acc += d * d;
        }
        return acc / static_cast<double>(hi - lo);
    };

    const double sensor_signal = span_power(clean.channels[0]);
    const double sensor_noise = diff_power(noisy.channels[0], clean.channels[0]);
    if (!(sensor_noise > 0.0)) fail(errc::undefined_snr, "noise power is zero at the sensor");
    if (!(sensor_signal > 0.0)) fail(errc::degenerate_signal, "clean recording is silent");

    const std::vector<double> delays = steering_delays(geometry, steer_deg);
    const std::vector<double> y_clean = delay_and_sum(clean, delays);
    const std::vector<double> y_noisy = delay_and_sum(noisy, delays);
    const double array_signal = span_power(y_clean);
    const double array_noise = diff_power(y_noisy, y_clean);
    if (!(array_noise > 0.0)) fail(errc::undefined_snr, "noise power is zero at the array output");

    return (array_signal / array_noise) / (sensor_signal / sensor_noise);
}

struct HeatmapCell {
    double array_angle_deg = 0.0;
    double frequency_hz = 0.0;
    ComparisonResult result;
};

/// Rectangular (array angle x frequency) grid of comparison results.
class HeatmapGrid {
public:
    const std::vector<double>& array_angles_deg() const noexcept { return angles_; }
    const std::vector<double>& frequencies_hz() const noexcept { return freqs_; }

    const ComparisonResult& at(std::size_t angle_idx, std::size_t freq_idx) const {
        return cells_[angle_idx * freqs_.size() + freq_idx];
    }

    std::size_t cell_count() const noexcept { return cells_.size(); }

    friend HeatmapGrid build_heatmap(const std::vector<HeatmapCell>& cells);

private:
    std::vector<double> angles_;
    std::vector<double> freqs_;
    std::vector<ComparisonResult> cells_;  // angle-major
};

/// Assembles the grid from per-cell results; the axes are inferred from the
/// cells and every (angle, frequency) combination must appear exactly once.
inline HeatmapGrid build_heatmap(const std::vector<HeatmapCell>& cells) {
    if (cells.empty()) fail(errc::incomplete_grid, "no cells");
    std::set<double> angle_set, freq_set;
    for (const auto& c : cells) {
        angle_set.insert(c.array_angle_deg);
        freq_set.insert(c.frequency_hz);
    }
    HeatmapGrid g;
    g.angles_.assign(angle_set.begin(), angle_set.end());
    g.freqs_.assign(freq_set.begin(), freq_set.end());
    const std::size_t expect = g.angles_.size() * g.freqs_.size();
    if (cells.size() != expect)
        fail(errc::incomplete_grid, "have " + std::to_string(cells.size()) + " cells, need " +
                                        std::to_string(expect) + " for full coverage");
    g.cells_.resize(expect);
    std::vector<bool> seen(expect, false);
    for (const auto& c : cells) {
        const auto ai = static_cast<std::size_t>(
            std::lower_bound(g.angles_.begin(), g.angles_.end(), c.array_angle_deg) -
            g.angles_.begin());
        const auto fi = static_cast<std::size_t>(
            std::lower_bound(g.freqs_.begin(), g.freqs_.end(), c.frequency_hz) - g.freqs_.begin());
        const std::size_t idx = ai * g.freqs_.size() + fi;
        if (seen[idx]) fail(errc::incomplete_grid, "duplicate cell coordinates");
        seen[idx] = true;
        g.cells_[idx] = c.result;
    }
    return g;
}

/// Mean rmse_percent over cells whose frequency lies in [f_lo, f_hi], endpoints included.
inline double band_average_rmse(const HeatmapGrid& g, double f_lo_hz, double f_hi_hz) {
    double acc = 0.0;
    std::size_t count = 0;
    for (std::size_t ai = 0; ai < g.array_angles_deg().size(); ++ai)
        for (std::size_t fi = 0; fi < g.frequencies_hz().size(); ++fi) {
            const double f = g.frequencies_hz()[fi];
            if (f < f_lo_hz || f > f_hi_hz) continue;
            acc += g.at(ai, fi).rmse_percent;
            ++count;
        }
    if (count == 0) fail(errc::incomplete_grid, "no cells in the requested band");
    return acc / static_cast<double>(count);
}

/// Mean area_difference over cells selected by a frequency predicate.
template <typename Pred>
inline double mean_area_difference_where(const HeatmapGrid& g, Pred&& include_frequency) {
    double acc = 0.0;
    std::size_t count = 0;
    for (std::size_t ai = 0; ai < g.array_angles_deg().size(); ++ai)
        for (std::size_t fi = 0; fi < g.frequencies_hz().size(); ++fi) {
            if (!include_frequency(g.frequencies_hz()[fi])) continue;
            acc += g.at(ai, fi).area_difference;
            ++count;
        }
    if (count == 0) fail(errc::incomplete_grid, "no cells selected");
    return acc / static_cast<double>(count);
}

}  // namespace dsbeam

#endif
