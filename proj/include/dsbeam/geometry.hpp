#ifndef DSBEAM_GEOMETRY_HPP
#define DSBEAM_GEOMETRY_HPP

#include <cmath>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dsbeam/error.hpp"

namespace dsbeam {

inline constexpr double kDefaultSpeedOfSound = 343.0;  // m/s in air at ~20 C

/// sin of an angle given in degrees, with the argument folded to [-90, 90]
/// in exact degree arithmetic first. Folding guarantees sin_deg(t) and
/// sin_deg(180 - t) are bit-identical, which the mirror-symmetry checks rely on.
inline double sin_deg(double degrees) {
    double x = std::fmod(degrees, 360.0);
    if (x < 0.0) x += 360.0;
    if (x > 270.0)
        x -= 360.0;
    else if (x > 90.0)
        x = 180.0 - x;
    return std::sin(x * std::numbers::pi / 180.0);
}

/// Positions of the elements of a linear microphone array along its axis.
/// Immutable after construction; safe to share across threads.
class ArrayGeometry {
public:
    explicit ArrayGeometry(std::vector<double> positions_m,
                           double speed_of_sound_mps = kDefaultSpeedOfSound)
        : positions_(std::move(positions_m)), speed_of_sound_(speed_of_sound_mps) {
        if (positions_.size() < 2)
            fail(errc::invalid_geometry, "array needs at least 2 elements");
        for (std::size_t i = 1; i < positions_.size(); ++i) {
            if (!(positions_[i] > positions_[i - 1]))
                fail(errc::invalid_geometry, "element positions must be strictly increasing");
        }
        if (!(speed_of_sound_ > 0.0))
            fail(errc::invalid_geometry, "speed of sound must be positive");
    }

    const std::vector<double>& positions() const noexcept { return positions_; }
    double speed_of_sound() const noexcept { return speed_of_sound_; }
    std::size_t size() const noexcept { return positions_.size(); }

    /// Center of the array, measured on the element axis.
    double centroid() const {
        return std::accumulate(positions_.begin(), positions_.end(), 0.0) /
               static_cast<double>(positions_.size());
    }

    /// Largest gap between consecutive elements; governs spatial aliasing.
    double max_spacing() const {
        double d = 0.0;
        for (std::size_t i = 1; i < positions_.size(); ++i)
            d = std::max(d, positions_[i] - positions_[i - 1]);
        return d;
    }

    bool is_uniform(double tol = 1e-9) const {
        const double d0 = positions_[1] - positions_[0];
        for (std::size_t i = 1; i < positions_.size(); ++i) {
            if (std::abs((positions_[i] - positions_[i - 1]) - d0) > tol) return false;
        }
        return true;
    }

    nlohmann::json to_json() const {
        return nlohmann::json{{"positions_m", positions_},
                              {"speed_of_sound_mps", speed_of_sound_}};
    }

    static ArrayGeometry from_json(const nlohmann::json& j) {
        if (!j.contains("positions_m") || !j.contains("speed_of_sound_mps"))
            fail(errc::invalid_geometry, "geometry JSON needs positions_m and speed_of_sound_mps");
        return ArrayGeometry(j.at("positions_m").get<std::vector<double>>(),
                             j.at("speed_of_sound_mps").get<double>());
    }

private:
    std::vector<double> positions_;
    double speed_of_sound_;
};

/// N equally spaced elements at {0, d, ..., (n-1) d}.
inline ArrayGeometry uniform_linear(std::size_t n, double spacing_m,
                                    double speed_of_sound_mps = kDefaultSpeedOfSound) {
    if (n < 2) fail(errc::invalid_geometry, "element count must be >= 2");
    if (!(spacing_m > 0.0)) fail(errc::invalid_geometry, "spacing must be positive");
    std::vector<double> pos(n);
    for (std::size_t i = 0; i < n; ++i) pos[i] = static_cast<double>(i) * spacing_m;
    return ArrayGeometry(std::move(pos), speed_of_sound_mps);
}

/// Supremum of inter-element spacings free of spatial aliasing up to f_max:
/// d < lambda_min / 2 with lambda_min = c / f_max.
inline double min_spacing_for(double f_max_hz, double c = kDefaultSpeedOfSound) {
    if (!(f_max_hz > 0.0)) fail(errc::invalid_frequency, "f_max must be positive");
    if (!(c > 0.0)) fail(errc::invalid_frequency, "speed of sound must be positive");
    return c / (2.0 * f_max_hz);
}

/// Highest frequency the array samples without spatial aliasing, c / (2 d),
/// taking d as the largest consecutive spacing.
inline double max_unaliased_frequency(const ArrayGeometry& geometry) {
    return geometry.speed_of_sound() / (2.0 * geometry.max_spacing());
}

/// Strict check: a signal exactly at the limit counts as aliased (the grating
/// lobe sits exactly at endfire there).
inline bool is_spatially_aliased(const ArrayGeometry& geometry, double f_hz) {
    return !(f_hz < max_unaliased_frequency(geometry));
}

}  // namespace dsbeam

#endif
