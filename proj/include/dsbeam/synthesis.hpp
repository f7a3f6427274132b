#ifndef DSBEAM_SYNTHESIS_HPP
#define DSBEAM_SYNTHESIS_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dsbeam/error.hpp"
#include "dsbeam/fractional_delay.hpp"
#include "dsbeam/geometry.hpp"

namespace dsbeam {

struct Tone {
    double frequency_hz;
};

struct LinearSweep {
    double f0_hz;
    double f1_hz;
};

using Waveform = std::variant<Tone, LinearSweep>;

/// Far-field plane-wave source. Azimuth is measured from broadside
/// (perpendicular to the array axis), counterclockwise positive, in [0, 360).
struct SourceSpec {
    double azimuth_deg = 0.0;
    Waveform waveform = Tone{1000.0};
    double amplitude = 0.5;  // linear full-scale fraction, (0, 1]
    double duration_s = 1.0;
};

/// One attenuated plane-wave reflection arriving from another azimuth.
struct Reflection {
    double azimuth_deg = 0.0;
    double gain = 0.0;         // (0, 1]
    double extra_delay_s = 0;  // path-length excess relative to the direct wave
};

struct DegradationSpec {
    double noise_rms = 0.0;  // per-channel additive white noise, linear amplitude
    std::vector<Reflection> reflections;

    static DegradationSpec none() { return {}; }
};

/// Sample rate plus equal-length per-channel buffers, nominal range [-1, 1].
struct MultichannelRecording {
    double sample_rate_hz = 0.0;
    std::vector<std::vector<double>> channels;

    std::size_t frames() const { return channels.empty() ? 0 : channels.front().size(); }
    std::size_t channel_count() const { return channels.size(); }

    void validate() const {
        if (channels.empty()) fail(errc::shape_error, "recording has no channels");
        if (!(sample_rate_hz > 0.0)) fail(errc::shape_error, "sample rate must be positive");
        for (const auto& c : channels)
            if (c.size() != channels.front().size())
                fail(errc::shape_error, "channels must have equal length");
    }
};

inline double max_waveform_frequency(const Waveform& w) {
    if (const auto* t = std::get_if<Tone>(&w)) return t->frequency_hz;
    return std::get<LinearSweep>(w).f1_hz;
}

inline void validate_source(const SourceSpec& s) {
    if (const auto* t = std::get_if<Tone>(&s.waveform)) {
        if (!(t->frequency_hz > 0.0)) fail(errc::invalid_frequency, "tone frequency must be positive");
    } else {
        const auto& sw = std::get<LinearSweep>(s.waveform);
        if (!(sw.f0_hz > 0.0) || !(sw.f1_hz > sw.f0_hz))
            fail(errc::invalid_frequency, "sweep requires f1 > f0 > 0");
    }
    if (!(s.amplitude > 0.0) || s.amplitude > 1.0)
        fail(errc::out_of_range, "amplitude must be in (0, 1]");
    if (!(s.duration_s > 0.0)) fail(errc::out_of_range, "duration must be positive");
    if (s.azimuth_deg < 0.0 || s.azimuth_deg >= 360.0)
        fail(errc::out_of_range, "azimuth must be in [0, 360)");
}

inline void validate_degradation(const DegradationSpec& d) {
    if (d.noise_rms < 0.0) fail(errc::out_of_range, "noise_rms must be >= 0");
    for (const auto& r : d.reflections) {
        if (!(r.gain > 0.0) || r.gain > 1.0) fail(errc::out_of_range, "reflection gain must be in (0, 1]");
        if (r.extra_delay_s < 0.0) fail(errc::out_of_range, "reflection delay must be >= 0");
    }
}

/// Instantaneous frequency of a linear sweep at time t: f0 + (f1 - f0) t / T.
inline double instantaneous_frequency(const LinearSweep& sweep, double t_s, double duration_s) {
    if (!(duration_s > 0.0)) fail(errc::out_of_range, "duration must be positive");
    if (t_s < 0.0 || t_s > duration_s) fail(errc::out_of_range, "t outside [0, duration]");
    return sweep.f0_hz + (sweep.f1_hz - sweep.f0_hz) * t_s / duration_s;
}

namespace detail {

// Deterministic Gaussian source: splitmix64 stream plus Marsaglia polar
// transform. std::normal_distribution is implementation-defined, so it is not
// used here; a seed must reproduce the exact same stream everywhere.
class GaussianNoise {
public:
    explicit GaussianNoise(std::uint64_t seed) : state_(seed) {}

    double operator()() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * next_unit() - 1.0;
            v = 2.0 * next_unit() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double r = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * r;
        have_spare_ = true;
        return u * r;
    }

private:
    double next_unit() {
        // xorshift-multiply step (splitmix64); uniform in [0, 1)
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return static_cast<double>(z >> 11) * 0x1.0p-53;
    }

    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Waveform sampled at the reference element, t in samples.
inline std::vector<double> render_waveform(const Waveform& w, double amplitude, std::size_t n,
                                           double sample_rate_hz) {
    std::vector<double> s(n);
    const double dt = 1.0 / sample_rate_hz;
    if (const auto* tone = std::get_if<Tone>(&w)) {
        const double omega = 2.0 * std::numbers::pi * tone->frequency_hz;
        for (std::size_t i = 0; i < n; ++i) s[i] = amplitude * std::sin(omega * (i * dt));
    } else {
        const auto& sw = std::get<LinearSweep>(w);
        const double total = static_cast<double>(n) * dt;
        const double k = (sw.f1_hz - sw.f0_hz) / total;  // Hz per second
        for (std::size_t i = 0; i < n; ++i) {
            const double t = i * dt;
            const double phase = 2.0 * std::numbers::pi * (sw.f0_hz * t + 0.5 * k * t * t);
            s[i] = amplitude * std::sin(phase);
        }
    }
    return s;
}

}  // namespace detail

/// Per-element arrival delays of a plane wave from the given azimuth,
/// relative to element 0: tau_i = (x_i - x_0) sin(azimuth) / c.
inline std::vector<double> plane_wave_delays(const ArrayGeometry& geometry, double azimuth_deg) {
    const double s = sin_deg(azimuth_deg);
    const double c = geometry.speed_of_sound();
    const double x0 = geometry.positions().front();
    std::vector<double> tau(geometry.size());
    for (std::size_t i = 0; i < geometry.size(); ++i)
        tau[i] = (geometry.positions()[i] - x0) * s / c;
    return tau;
}

/// Synthesizes the multichannel recording of a far-field plane wave (plus
/// optional reflections and white noise) arriving at the array. Channel i is
/// the source waveform delayed by its arrival delay; fractional delays are
/// applied with the shared interpolation kernel; samples before the waveform
/// onset are zero.
inline MultichannelRecording synthesize(const SourceSpec& source, const ArrayGeometry& geometry,
                                        double sample_rate_hz,
                                        const DegradationSpec& degrade = DegradationSpec::none(),
                                        std::uint64_t seed = 0) {
    validate_source(source);
    validate_degradation(degrade);
    if (!(sample_rate_hz > 0.0)) fail(errc::out_of_range, "sample rate must be positive");
    const double f_max = max_waveform_frequency(source.waveform);
    if (sample_rate_hz < 2.0 * f_max)
        fail(errc::aliased_synthesis, "sample rate below temporal Nyquist for " +
                                          std::to_string(f_max) + " Hz");

    const std::size_t n = static_cast<std::size_t>(std::llround(source.duration_s * sample_rate_hz));
    if (n == 0) fail(errc::out_of_range, "duration shorter than one sample");

    MultichannelRecording rec;
    rec.sample_rate_hz = sample_rate_hz;
    rec.channels.assign(geometry.size(), std::vector<double>(n, 0.0));

    const auto add_plane_wave = [&](double azimuth_deg, double gain, double extra_delay_s) {
        const std::vector<double> master =
            detail::render_waveform(source.waveform, source.amplitude * gain, n, sample_rate_hz);
        const std::vector<double> tau = plane_wave_delays(geometry, azimuth_deg);
        for (std::size_t i = 0; i < geometry.size(); ++i) {
            const double delay_samples = (tau[i] + extra_delay_s) * sample_rate_hz;
            detail::add_shifted(rec.channels[i], master, delay_samples);
        }
    };

    add_plane_wave(source.azimuth_deg, 1.0, 0.0);
    for (const auto& r : degrade.reflections) add_plane_wave(r.azimuth_deg, r.gain, r.extra_delay_s);

    if (degrade.noise_rms > 0.0) {
        detail::GaussianNoise rng(seed);
        for (auto& ch : rec.channels)
            for (auto& v : ch) v += degrade.noise_rms * rng();
    }
    return rec;
}

/// Cuts the window of all channels centered where the sweep's instantaneous
/// frequency passes target_f, clamped to the recording bounds.
inline MultichannelRecording extract_band_segment(const MultichannelRecording& rec,
                                                  const LinearSweep& sweep, double target_f_hz,
                                                  std::size_t window_len) {
    rec.validate();
    if (target_f_hz < sweep.f0_hz || target_f_hz > sweep.f1_hz)
        fail(errc::out_of_range, "target frequency outside sweep band");
    if (window_len == 0) fail(errc::out_of_range, "window length must be positive");
    const std::size_t n = rec.frames();
    if (window_len > n) fail(errc::window_too_long, "window exceeds recording length");

    const double duration_s = static_cast<double>(n) / rec.sample_rate_hz;
    const double t_star = (target_f_hz - sweep.f0_hz) / (sweep.f1_hz - sweep.f0_hz) * duration_s;
    const auto center = static_cast<std::ptrdiff_t>(std::llround(t_star * rec.sample_rate_hz));
    std::ptrdiff_t start = center - static_cast<std::ptrdiff_t>(window_len / 2);
    start = std::clamp<std::ptrdiff_t>(start, 0, static_cast<std::ptrdiff_t>(n - window_len));

    MultichannelRecording out;
    out.sample_rate_hz = rec.sample_rate_hz;
    out.channels.reserve(rec.channel_count());
    for (const auto& ch : rec.channels)
        out.channels.emplace_back(ch.begin() + start, ch.begin() + start + window_len);
    return out;
}

}  // namespace dsbeam

#endif
