#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "dsbeam/beamformer.hpp"
#include "dsbeam/synthesis.hpp"

using namespace dsbeam;
using Catch::Approx;

namespace {

const ArrayGeometry kPair = uniform_linear(2, 0.084, 343.0);
constexpr double kRate = 96000.0;

double span_rms(const std::vector<double>& x, double sample_rate) {
    const std::size_t edge = static_cast<std::size_t>(std::llround(0.001 * sample_rate));
    double acc = 0.0;
    for (std::size_t i = edge; i < x.size() - edge; ++i) acc += x[i] * x[i];
    return std::sqrt(acc / static_cast<double>(x.size() - 2 * edge));
}

std::size_t grid_index(const SteeringGrid& grid, double angle) {
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (grid[i] == angle) return i;
    FAIL("angle not on grid");
    return 0;
}

// durations whose analysis span holds an integer number of cycles for the
// tone frequencies used here (span multiple of 1920 samples at 96 kHz)
constexpr double kShortTone = 9792.0 / 96000.0;

}  // namespace

TEST_CASE("steering delays per element") {
    CHECK(steering_delays(kPair, 0.0) == std::vector<double>{0.0, 0.0});

    const auto endfire = steering_delays(kPair, 90.0);
    CHECK(endfire[0] == 0.0);
    CHECK(endfire[1] == Approx(2.44898e-4).epsilon(1e-5));

    const auto thirty = steering_delays(kPair, 30.0);
    CHECK(thirty[1] == Approx(1.22449e-4).epsilon(1e-5));

    const auto twelve = steering_delays(uniform_linear(12, 0.084), 90.0);
    CHECK(twelve.back() == Approx(11.0 * 2.44898e-4).epsilon(1e-5));
}

TEST_CASE("delay_and_sum with zero delays averages the channels") {
    const SourceSpec src{0.0, Tone{1650.0}, 0.5, kShortTone};
    const auto rec = synthesize(src, kPair, kRate);
    const auto out = delay_and_sum(rec, std::vector<double>{0.0, 0.0});
    REQUIRE(out.size() == rec.frames());
    CHECK(out == rec.channels[0]);  // identical channels, zero shift
    CHECK(span_rms(out, kRate) == Approx(span_rms(rec.channels[0], kRate)).margin(1e-6));
}

TEST_CASE("compensating the true TDOA is coherent; adding half a period cancels") {
    const double f = 1000.0;
    const SourceSpec src{30.0, Tone{f}, 0.5, kShortTone};
    const auto rec = synthesize(src, kPair, kRate);

    auto delays = steering_delays(kPair, 30.0);
    const auto aligned = delay_and_sum(rec, delays);
    const double rms_single = span_rms(rec.channels[0], kRate);
    CHECK(span_rms(aligned, kRate) == Approx(rms_single).epsilon(0.01));

    delays[1] += 0.5 / f;
    const auto cancelled = delay_and_sum(rec, delays);
    CHECK(span_rms(cancelled, kRate) < 0.02 * rms_single);
}

TEST_CASE("delay_and_sum validates shapes") {
    const SourceSpec src{0.0, Tone{1000.0}, 0.5, 0.02};
    const auto rec = synthesize(src, kPair, kRate);
    CHECK_THROWS_AS(delay_and_sum(rec, std::vector<double>{0.0, 0.0, 0.0}), Error);
}

TEST_CASE("beam pattern peaks at the source azimuth and its mirror") {
    const SourceSpec src{50.0, Tone{1650.0}, 0.5, kShortTone};
    const auto rec = synthesize(src, kPair, kRate);
    const auto grid = SteeringGrid::full_circle(1.0);
    const auto p = beam_pattern(rec, kPair, grid, 1650.0, 50.0);

    REQUIRE(p.values.size() == 360);
    CHECK(*std::max_element(p.values.begin(), p.values.end()) == 1.0);
    CHECK(*std::min_element(p.values.begin(), p.values.end()) >= 0.0);
    CHECK(p.values[grid_index(grid, 50.0)] == 1.0);
    CHECK(p.values[grid_index(grid, 130.0)] == 1.0);  // ULA mirror
}

TEST_CASE("beam pattern is mirror symmetric") {
    const SourceSpec src{35.0, Tone{1200.0}, 0.5, kShortTone};
    const auto rec = synthesize(src, kPair, kRate);
    const auto grid = SteeringGrid::full_circle(1.0);
    const auto p = beam_pattern(rec, kPair, grid);
    for (int a = 0; a < 360; ++a) {
        const int mirror = ((180 - a) % 360 + 360) % 360;
        CHECK(std::abs(p.values[static_cast<std::size_t>(a)] -
                       p.values[static_cast<std::size_t>(mirror)]) < 1e-3);
    }
}

TEST_CASE("beam pattern rejects degenerate input") {
    MultichannelRecording silent;
    silent.sample_rate_hz = kRate;
    silent.channels.assign(2, std::vector<double>(4800, 0.0));
    const auto grid = SteeringGrid::full_circle(1.0);
    CHECK_THROWS_AS(beam_pattern(silent, kPair, grid), Error);

    const SourceSpec src{0.0, Tone{1000.0}, 0.5, 0.05};
    const auto rec = synthesize(src, kPair, kRate);
    CHECK_THROWS_AS(beam_pattern(rec, uniform_linear(3, 0.084), grid), Error);
}

TEST_CASE("theoretical pattern equals the two-element closed form") {
    const double f = 1650.0, d = 0.084, c = 343.0, theta_s = 50.0;
    const auto grid = SteeringGrid::full_circle(1.0);
    const auto p = theoretical_beam_pattern(kPair, theta_s, f, grid);
    CHECK(p.values[grid_index(grid, 50.0)] == 1.0);
    for (std::size_t i = 0; i < grid.size(); i += 7) {
        const double expected =
            std::pow(std::cos(std::numbers::pi * f * d * (sin_deg(grid[i]) - sin_deg(theta_s)) / c), 2);
        CHECK(p.values[i] == Approx(expected).margin(1e-12));
    }
}

TEST_CASE("theoretical pattern is mirror symmetric") {
    const auto grid = SteeringGrid::full_circle(1.0);
    const auto p = theoretical_beam_pattern(uniform_linear(3, 0.084), 77.0, 1400.0, grid);
    for (int a = 0; a < 360; ++a) {
        const int mirror = ((180 - a) % 360 + 360) % 360;
        CHECK(p.values[static_cast<std::size_t>(a)] ==
              Approx(p.values[static_cast<std::size_t>(mirror)]).margin(1e-12));
    }
}

TEST_CASE("simulated and closed-form patterns agree") {
    const auto grid = SteeringGrid::full_circle(1.0);
    for (std::size_t n : {2u, 3u}) {
        const ArrayGeometry g = uniform_linear(n, 0.084, 343.0);
        for (double f : {1000.0, 2000.0}) {
            for (double theta_s : {0.0, 30.0, 50.0, 90.0}) {
                const SourceSpec src{theta_s, Tone{f}, 0.5, kShortTone};
                const auto sim = beam_pattern(synthesize(src, g, kRate), g, grid);
                const auto theory = theoretical_beam_pattern(g, theta_s, f, grid);
                double worst = 0.0;
                for (std::size_t i = 0; i < grid.size(); ++i)
                    worst = std::max(worst, std::abs(sim.values[i] - theory.values[i]));
                INFO("N=" << n << " f=" << f << " theta_s=" << theta_s);
                CHECK(worst < 1e-2);
            }
        }
    }
}

TEST_CASE("DOA recovery on unaliased tones") {
    const auto grid = SteeringGrid::full_circle(1.0);
    for (double theta_s : {0.0, 20.0, 60.0, 90.0, 110.0, 170.0}) {
        const SourceSpec src{theta_s, Tone{1650.0}, 0.5, kShortTone};
        const auto p = beam_pattern(synthesize(src, kPair, kRate), kPair, grid);
        std::size_t best = 0;
        for (std::size_t i = 1; i < p.values.size(); ++i)
            if (p.values[i] > p.values[best]) best = i;
        const double peak = grid[best];
        const double mirror = std::fmod(180.0 - theta_s + 360.0, 360.0);
        const double err = std::min(std::abs(peak - theta_s), std::abs(peak - mirror));
        INFO("theta_s=" << theta_s << " peak=" << peak);
        CHECK(err <= 1.0);
    }
}

TEST_CASE("aliased tone grows a grating lobe") {
    // f = 2500 Hz, d = 0.084: |sin(g) - sin(50)| = c/(f d) puts the grating
    // lobe at asin(-0.8673) = 299.87 deg, nearest grid angle 300
    const double f = 2500.0;
    const SourceSpec src{50.0, Tone{f}, 0.5, kShortTone};
    const auto grid = SteeringGrid::full_circle(1.0);
    const auto p = beam_pattern(synthesize(src, kPair, kRate), kPair, grid, f, 50.0);
    CHECK(p.values[grid_index(grid, 300.0)] >= 0.95);
}

TEST_CASE("a global time shift leaves the pattern unchanged") {
    const SourceSpec src{40.0, Tone{1650.0}, 0.5, 0.502};
    const auto rec = synthesize(src, kPair, kRate);
    MultichannelRecording shifted;
    shifted.sample_rate_hz = rec.sample_rate_hz;
    for (const auto& ch : rec.channels) {
        std::vector<double> s(ch.size(), 0.0);
        for (std::size_t i = 37; i < ch.size(); ++i) s[i] = ch[i - 37];
        shifted.channels.push_back(std::move(s));
    }
    const auto grid = SteeringGrid::full_circle(1.0);
    const auto p0 = beam_pattern(rec, kPair, grid);
    const auto p1 = beam_pattern(shifted, kPair, grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(std::abs(p0.values[i] - p1.values[i]) < 1e-3);
}

TEST_CASE("steering grid validation") {
    CHECK_THROWS_AS(SteeringGrid(std::vector<double>{}), Error);
    CHECK_THROWS_AS(SteeringGrid({10.0, 5.0}), Error);
    CHECK_THROWS_AS(SteeringGrid({-1.0, 5.0}), Error);
    CHECK_THROWS_AS(SteeringGrid({0.0, 360.0}), Error);
    CHECK(SteeringGrid::full_circle(1.0).size() == 360);
    CHECK(SteeringGrid::full_circle(0.5).size() == 720);
}
