#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "dsbeam/synthesis.hpp"

using namespace dsbeam;
using Catch::Approx;

namespace {

const ArrayGeometry kPair = uniform_linear(2, 0.084, 343.0);
constexpr double kRate = 96000.0;

// Integer-lag cross-correlation peak between two 1 kHz tone channels. The
// search range must stay below half a period so the peak is unambiguous, and
// the evaluation window is a fixed span holding a whole number of half-period
// pairs (48 samples at 96 kHz), which cancels the oscillatory bias term that
// would otherwise tip near-half-sample fractional delays to the wrong lag.
int xcorr_peak_lag(const std::vector<double>& a, const std::vector<double>& b, int max_lag) {
    const int n = static_cast<int>(a.size());
    const int i0 = max_lag + 30;  // clear of the zero-filled onset
    const int span = ((n - i0 - max_lag - 8) / 48) * 48;
    REQUIRE(span >= 48);
    double best = -1.0;
    int best_lag = 0;
    for (int lag = -max_lag; lag <= max_lag; ++lag) {
        double acc = 0.0;
        for (int i = i0; i < i0 + span; ++i) acc += a[i - lag] * b[i];
        if (acc > best) {
            best = acc;
            best_lag = lag;
        }
    }
    return best_lag;
}

}  // namespace

TEST_CASE("the fused shift kernel matches the per-sample interpolation") {
    std::vector<double> in(64);
    for (std::size_t i = 0; i < in.size(); ++i)
        in[i] = std::sin(0.37 * static_cast<double>(i)) + 0.01 * static_cast<double>(i);
    for (double delay : {0.0, 3.0, -5.0, 12.345, -7.891, 0.5, 63.2, -63.7, 70.0, -70.0}) {
        std::vector<double> fused(in.size(), 0.0);
        detail::add_shifted(fused, in, delay, 0.75);
        for (std::size_t t = 0; t < in.size(); ++t) {
            const double direct = 0.75 * detail::sample_at(in, static_cast<double>(t) - delay);
            INFO("delay " << delay << " t " << t);
            REQUIRE(fused[t] == Approx(direct).margin(1e-12));
        }
    }
}

TEST_CASE("broadside synthesis yields identical channels") {
    const SourceSpec src{0.0, Tone{1650.0}, 0.5, 0.05};
    const auto rec = synthesize(src, kPair, kRate);
    REQUIRE(rec.channel_count() == 2);
    REQUIRE(rec.frames() == 4800);
    CHECK(rec.channels[0] == rec.channels[1]);

    const SourceSpec back{180.0, Tone{1650.0}, 0.5, 0.05};
    const auto rec180 = synthesize(back, kPair, kRate);
    CHECK(rec180.channels[0] == rec180.channels[1]);
}

TEST_CASE("synthesized TDOA matches d sin(theta) / c") {
    // endfire: the inter-channel delay is d / c = 244.9 us = 23.51 samples
    const double d_samples = 0.084 / 343.0 * kRate;
    const SourceSpec src{90.0, Tone{1000.0}, 0.5, 0.05};
    const auto rec = synthesize(src, kPair, kRate);
    const int lag = xcorr_peak_lag(rec.channels[0], rec.channels[1], 26);
    CHECK(std::abs(lag - d_samples) <= 0.5 + 1e-9);
    CHECK(std::abs(lag / kRate - 2.44898e-4) < 0.5 / kRate + 1e-9);
}

TEST_CASE("TDOA tracks the full azimuth circle") {
    // 1 kHz tone: period 96 samples, twice the largest possible lag, so the
    // correlation peak in +-26 samples is unique.
    for (int az = 0; az < 360; az += 1) {
        const SourceSpec src{static_cast<double>(az), Tone{1000.0}, 0.5, 0.02};
        const auto rec = synthesize(src, kPair, kRate);
        const double expected = 0.084 * sin_deg(az) / 343.0 * kRate;
        const int lag = xcorr_peak_lag(rec.channels[0], rec.channels[1], 26);
        INFO("azimuth " << az);
        REQUIRE(std::abs(lag - expected) <= 0.5 + 1e-9);
    }
}

TEST_CASE("mirror azimuths produce identical recordings") {
    const SourceSpec a{73.0, Tone{1650.0}, 0.5, 0.03};
    const SourceSpec b{107.0, Tone{1650.0}, 0.5, 0.03};
    CHECK(synthesize(a, kPair, kRate).channels == synthesize(b, kPair, kRate).channels);
}

TEST_CASE("zero noise is a no-op and seeds are reproducible") {
    const SourceSpec src{40.0, Tone{900.0}, 0.5, 0.02};
    DegradationSpec silent;
    silent.noise_rms = 0.0;
    CHECK(synthesize(src, kPair, kRate).channels ==
          synthesize(src, kPair, kRate, silent).channels);

    DegradationSpec noisy;
    noisy.noise_rms = 0.01;
    const auto r1 = synthesize(src, kPair, kRate, noisy, 7);
    const auto r2 = synthesize(src, kPair, kRate, noisy, 7);
    const auto r3 = synthesize(src, kPair, kRate, noisy, 8);
    CHECK(r1.channels == r2.channels);
    CHECK(r1.channels != r3.channels);
}

TEST_CASE("noise level matches the requested RMS") {
    const SourceSpec src{0.0, Tone{1000.0}, 0.5, 0.5};
    DegradationSpec deg;
    deg.noise_rms = 0.05;
    const auto clean = synthesize(src, kPair, kRate);
    const auto noisy = synthesize(src, kPair, kRate, deg, 3);
    double acc = 0.0;
    for (std::size_t i = 0; i < clean.frames(); ++i) {
        const double d = noisy.channels[0][i] - clean.channels[0][i];
        acc += d * d;
    }
    CHECK(std::sqrt(acc / static_cast<double>(clean.frames())) == Approx(0.05).epsilon(0.02));
}

TEST_CASE("reflections add attenuated plane waves") {
    const SourceSpec src{20.0, Tone{1200.0}, 0.5, 0.03};
    DegradationSpec deg;
    deg.reflections.push_back({200.0, 0.5, 0.001});
    const auto plain = synthesize(src, kPair, kRate);
    const auto with_refl = synthesize(src, kPair, kRate, deg);
    REQUIRE(plain.channels != with_refl.channels);
    // reflected contribution alone has about half the direct amplitude
    double p_extra = 0.0, p_direct = 0.0;
    for (std::size_t i = 2000; i < plain.frames(); ++i) {
        const double e = with_refl.channels[0][i] - plain.channels[0][i];
        p_extra += e * e;
        p_direct += plain.channels[0][i] * plain.channels[0][i];
    }
    CHECK(std::sqrt(p_extra / p_direct) == Approx(0.5).epsilon(0.05));
}

TEST_CASE("synthesis rejects invalid input") {
    CHECK_THROWS_AS(synthesize({0.0, Tone{3000.0}, 0.5, 0.1}, kPair, 5000.0), Error);
    CHECK_THROWS_AS(synthesize({0.0, Tone{-1.0}, 0.5, 0.1}, kPair, kRate), Error);
    CHECK_THROWS_AS(synthesize({0.0, Tone{1000.0}, 1.5, 0.1}, kPair, kRate), Error);
    CHECK_THROWS_AS(synthesize({0.0, Tone{1000.0}, 0.5, -0.1}, kPair, kRate), Error);
    CHECK_THROWS_AS(synthesize({361.0, Tone{1000.0}, 0.5, 0.1}, kPair, kRate), Error);
    CHECK_THROWS_AS(synthesize({0.0, LinearSweep{2000.0, 700.0}, 0.5, 0.1}, kPair, kRate), Error);
    try {
        synthesize({0.0, Tone{3000.0}, 0.5, 0.1}, kPair, 5000.0);
        FAIL("expected aliased-synthesis");
    } catch (const Error& e) {
        CHECK(e.kind() == errc::aliased_synthesis);
    }
}

TEST_CASE("instantaneous frequency of a linear sweep") {
    const LinearSweep sweep{500.0, 3000.0};
    CHECK(instantaneous_frequency(sweep, 0.0, 10.0) == 500.0);
    CHECK(instantaneous_frequency(sweep, 10.0, 10.0) == 3000.0);
    CHECK(instantaneous_frequency(sweep, 4.6, 10.0) == Approx(1650.0));
    CHECK(instantaneous_frequency(sweep, 5.0, 10.0) == Approx(1750.0));
    CHECK_THROWS_AS(instantaneous_frequency(sweep, -0.1, 10.0), Error);
    CHECK_THROWS_AS(instantaneous_frequency(sweep, 10.1, 10.0), Error);
}

TEST_CASE("sweep synthesis hits the expected frequency mid-recording") {
    const SourceSpec src{0.0, LinearSweep{500.0, 3000.0}, 0.5, 10.0};
    const auto rec = synthesize(src, kPair, kRate);
    REQUIRE(rec.frames() == 960000);
    // zero-crossing count around t = 5 s: expect close to 1750 Hz
    const std::size_t lo = 475200, hi = 484800;  // 0.1 s window centered at 5 s
    std::size_t crossings = 0;
    for (std::size_t i = lo + 1; i < hi; ++i) {
        if ((rec.channels[0][i - 1] < 0.0) != (rec.channels[0][i] < 0.0)) ++crossings;
    }
    const double f_est = static_cast<double>(crossings) / (2.0 * 0.1);
    CHECK(std::abs(f_est - 1750.0) < 15.0);
}

TEST_CASE("extract_band_segment centers the window on the target frequency") {
    const SourceSpec src{0.0, LinearSweep{500.0, 3000.0}, 0.5, 10.0};
    const auto rec = synthesize(src, kPair, kRate);
    const LinearSweep sweep{500.0, 3000.0};

    SECTION("1650 Hz sits at sample 441600") {
        const auto seg = extract_band_segment(rec, sweep, 1650.0, 4096);
        REQUIRE(seg.frames() == 4096);
        REQUIRE(seg.channel_count() == 2);
        const std::size_t start = 441600 - 2048;
        for (std::size_t k : {0u, 1000u, 4095u})
            CHECK(seg.channels[0][k] == rec.channels[0][start + k]);
    }
    SECTION("band edges clamp to the recording") {
        const auto lo = extract_band_segment(rec, sweep, 500.0, 4096);
        CHECK(lo.channels[1][0] == rec.channels[1][0]);
        const auto hi = extract_band_segment(rec, sweep, 3000.0, 4096);
        CHECK(hi.channels[0][4095] == rec.channels[0][rec.frames() - 1]);
    }
    SECTION("errors") {
        CHECK_THROWS_AS(extract_band_segment(rec, sweep, 3500.0, 4096), Error);
        CHECK_THROWS_AS(extract_band_segment(rec, sweep, 499.0, 4096), Error);
        try {
            extract_band_segment(rec, sweep, 1650.0, 2000000);
            FAIL("expected window-too-long");
        } catch (const Error& e) {
            CHECK(e.kind() == errc::window_too_long);
        }
    }
}
