#ifndef DSBEAM_BEAMFORMER_HPP
#define DSBEAM_BEAMFORMER_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "dsbeam/error.hpp"
#include "dsbeam/fractional_delay.hpp"
#include "dsbeam/geometry.hpp"
#include "dsbeam/synthesis.hpp"

namespace dsbeam {

/// Ordered steering azimuths in [0, 360).
class SteeringGrid {
public:
    explicit SteeringGrid(std::vector<double> angles_deg) : angles_(std::move(angles_deg)) {
        if (angles_.empty()) fail(errc::shape_error, "steering grid must be non-empty");
        for (std::size_t i = 0; i < angles_.size(); ++i) {
            if (angles_[i] < 0.0 || angles_[i] >= 360.0)
                fail(errc::out_of_range, "steering angles must be in [0, 360)");
            if (i > 0 && !(angles_[i] > angles_[i - 1]))
                fail(errc::shape_error, "steering angles must be strictly increasing");
        }
    }

    /// [0, 360) at the given step; 1 degree by default.
    static SteeringGrid full_circle(double step_deg = 1.0) {
        if (!(step_deg > 0.0)) fail(errc::out_of_range, "grid step must be positive");
        std::vector<double> a;
        a.reserve(static_cast<std::size_t>(360.0 / step_deg) + 1);
        for (double x = 0.0; x < 360.0; x += step_deg) a.push_back(x);
        return SteeringGrid(std::move(a));
    }

    const std::vector<double>& angles() const noexcept { return angles_; }
    std::size_t size() const noexcept { return angles_.size(); }
    double operator[](std::size_t i) const { return angles_[i]; }

    friend bool operator==(const SteeringGrid& a, const SteeringGrid& b) {
        return a.angles_ == b.angles_;
    }

private:
    std::vector<double> angles_;
};

/// Normalized output power per steering angle for one scene; max is 1.
struct BeamPattern {
    SteeringGrid grid;
    std::vector<double> values;
    std::optional<double> frequency_hz;
    std::optional<double> source_azimuth_deg;
};

/// Per-element arrival delays of a plane wave from steer_deg, relative to
/// element 0. Compensating exactly these delays time-aligns that wave.
inline std::vector<double> steering_delays(const ArrayGeometry& geometry, double steer_deg) {
    return plane_wave_delays(geometry, steer_deg);
}

namespace detail {

// Aligned average into a caller-provided buffer: out[t] = (1/N) sum_i ch_i(t + delay_i).
inline void delay_and_sum_into(const MultichannelRecording& rec, std::span<const double> delays_s,
                               std::vector<double>& out) {
    if (delays_s.size() != rec.channel_count())
        fail(errc::shape_error, "delay count must match channel count");
    rec.validate();
    const std::size_t n = rec.frames();
    out.assign(n, 0.0);
    const double inv_n = 1.0 / static_cast<double>(rec.channel_count());
    for (std::size_t i = 0; i < rec.channel_count(); ++i) {
        // advancing by delay_i == reading at t - (-delay_i)
        add_shifted(out, rec.channels[i], -delays_s[i] * rec.sample_rate_hz, inv_n);
    }
}

// Mean squared value over [lo, hi).
inline double mean_power(std::span<const double> x, std::size_t lo, std::size_t hi) {
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) acc += x[i] * x[i];
    return acc / static_cast<double>(hi - lo);
}

// Samples excluded at each end of the analysis span (1 ms).
inline std::size_t edge_exclusion(double sample_rate_hz) {
    return static_cast<std::size_t>(std::llround(0.001 * sample_rate_hz));
}

}  // namespace detail

/// Time-domain delay-and-sum: each channel is shifted to compensate its delay
/// (delays are arrival delays relative to the reference element, as produced
/// by steering_delays) and the shifted channels are averaged. Out-of-range
/// samples read as zero; the output has the input length.
inline std::vector<double> delay_and_sum(const MultichannelRecording& rec,
                                         std::span<const double> delays_s) {
    std::vector<double> out;
    detail::delay_and_sum_into(rec, delays_s, out);
    return out;
}

/// Scans the steering grid: per angle, the delay-and-sum output RMS squared
/// over the analysis span (1 ms trimmed at each end), normalized so the grid
/// maximum is exactly 1.
inline BeamPattern beam_pattern(const MultichannelRecording& rec, const ArrayGeometry& geometry,
                                const SteeringGrid& grid,
                                std::optional<double> frequency_hz = std::nullopt,
                                std::optional<double> source_azimuth_deg = std::nullopt) {
    rec.validate();
    if (rec.channel_count() != geometry.size())
        fail(errc::shape_error, "recording channel count must match element count");
    const std::size_t n = rec.frames();
    const std::size_t edge = detail::edge_exclusion(rec.sample_rate_hz);
    if (n <= 2 * edge)
        fail(errc::degenerate_signal, "recording shorter than the analysis span");

    std::vector<double> values(grid.size());
    std::vector<double> acc;
    acc.reserve(n);
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
        const std::vector<double> delays = steering_delays(geometry, grid[gi]);
        detail::delay_and_sum_into(rec, delays, acc);
        values[gi] = detail::mean_power(acc, edge, n - edge);
    }
    const double peak = *std::max_element(values.begin(), values.end());
    if (!(peak > 0.0)) fail(errc::degenerate_signal, "all-zero recording: normalization undefined");
    for (auto& v : values) v /= peak;
    return BeamPattern{grid, std::move(values), frequency_hz, source_azimuth_deg};
}

/// Closed-form narrowband pattern of an ideal plane wave:
/// P(theta) = |(1/N) sum_i exp(j 2 pi f (tau_i(theta_s) - tau_i(theta)))|^2,
/// normalized to a grid maximum of 1. Must agree with beam_pattern() run on a
/// noise-free synthesized tone.
inline BeamPattern theoretical_beam_pattern(const ArrayGeometry& geometry, double source_azimuth_deg,
                                            double frequency_hz, const SteeringGrid& grid) {
    if (!(frequency_hz > 0.0)) fail(errc::invalid_frequency, "frequency must be positive");
    const std::vector<double> tau_s = plane_wave_delays(geometry, source_azimuth_deg);
    const double n_inv = 1.0 / static_cast<double>(geometry.size());
    std::vector<double> values(grid.size());
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
        const std::vector<double> tau = plane_wave_delays(geometry, grid[gi]);
        double re = 0.0, im = 0.0;
        for (std::size_t i = 0; i < geometry.size(); ++i) {
            const double phi = 2.0 * std::numbers::pi * frequency_hz * (tau_s[i] - tau[i]);
            re += std::cos(phi);
            im += std::sin(phi);
        }
        values[gi] = (re * re + im * im) * n_inv * n_inv;
    }
    const double peak = *std::max_element(values.begin(), values.end());
    for (auto& v : values) v /= peak;
    return BeamPattern{grid, std::move(values), frequency_hz, source_azimuth_deg};
}

}  // namespace dsbeam

#endif
