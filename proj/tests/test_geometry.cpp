#include <catch2/catch_amalgamated.hpp>

#include "dsbeam/geometry.hpp"

using namespace dsbeam;
using Catch::Approx;

TEST_CASE("uniform_linear builds the prototype geometry") {
    const ArrayGeometry g = uniform_linear(2, 0.084, 343.0);
    REQUIRE(g.positions() == std::vector<double>{0.0, 0.084});
    CHECK(g.centroid() == Approx(0.042));
    CHECK(g.speed_of_sound() == 343.0);
    CHECK(g.is_uniform());
}

TEST_CASE("uniform_linear generalizes to N elements") {
    const ArrayGeometry g = uniform_linear(12, 0.084, 343.0);
    REQUIRE(g.size() == 12);
    CHECK(g.positions().back() == Approx(0.924));
    CHECK(g.max_spacing() == Approx(0.084));
}

TEST_CASE("geometry construction rejects bad input") {
    CHECK_THROWS_MATCHES(uniform_linear(1, 0.084), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.kind() == errc::invalid_geometry;
                         }));
    CHECK_THROWS_AS(uniform_linear(2, 0.0), Error);
    CHECK_THROWS_AS(uniform_linear(2, -0.1), Error);
    CHECK_THROWS_AS(ArrayGeometry({0.0, 0.084}, 0.0), Error);
    CHECK_THROWS_AS(ArrayGeometry({0.084, 0.0}), Error);
    CHECK_THROWS_AS(ArrayGeometry({0.1}), Error);
}

TEST_CASE("min_spacing_for matches the half-wavelength bound") {
    CHECK(min_spacing_for(2000.0, 343.0) == Approx(0.085750).margin(1e-12));
    CHECK(min_spacing_for(1000.0, 343.0) == Approx(0.1715).margin(1e-12));
    CHECK_THROWS_AS(min_spacing_for(0.0, 343.0), Error);
    CHECK_THROWS_AS(min_spacing_for(-50.0, 343.0), Error);
}

TEST_CASE("max_unaliased_frequency is c over twice the spacing") {
    CHECK(max_unaliased_frequency(uniform_linear(2, 0.084, 343.0)) ==
          Approx(2041.6666666667).margin(1e-6));
    CHECK(max_unaliased_frequency(uniform_linear(2, 0.08575, 343.0)) == Approx(2000.0));
    CHECK(max_unaliased_frequency(uniform_linear(2, 0.1715, 343.0)) == Approx(1000.0));
}

TEST_CASE("spacing bound and aliasing limit are inverses") {
    for (double spacing : {0.02, 0.084, 0.0857, 0.17, 0.5}) {
        const ArrayGeometry g = uniform_linear(3, spacing, 343.0);
        CHECK(min_spacing_for(max_unaliased_frequency(g), g.speed_of_sound()) ==
              Approx(spacing).epsilon(1e-9));
    }
}

TEST_CASE("the bounds are strictly monotone") {
    double prev = min_spacing_for(100.0);
    for (double f = 200.0; f <= 4000.0; f += 100.0) {
        const double d = min_spacing_for(f);
        CHECK(d < prev);
        prev = d;
    }
    double prev_f = max_unaliased_frequency(uniform_linear(2, 0.01));
    for (double d = 0.02; d < 0.5; d += 0.01) {
        const double f = max_unaliased_frequency(uniform_linear(2, d));
        CHECK(f < prev_f);
        prev_f = f;
    }
}

TEST_CASE("the exact aliasing boundary counts as aliased") {
    const ArrayGeometry g = uniform_linear(2, 0.08575, 343.0);
    CHECK(is_spatially_aliased(g, 2000.0));
    CHECK_FALSE(is_spatially_aliased(g, 1999.9));
    CHECK(is_spatially_aliased(g, 2500.0));
}

TEST_CASE("geometry JSON round-trip") {
    const ArrayGeometry g = uniform_linear(3, 0.084, 340.5);
    const nlohmann::json j = g.to_json();
    CHECK(j.at("positions_m").size() == 3);
    CHECK(j.at("speed_of_sound_mps").get<double>() == 340.5);
    const ArrayGeometry back = ArrayGeometry::from_json(j);
    CHECK(back.positions() == g.positions());
    CHECK(back.speed_of_sound() == g.speed_of_sound());
    CHECK_THROWS_AS(ArrayGeometry::from_json(nlohmann::json{{"positions_m", {0.0, 0.1}}}), Error);
}

TEST_CASE("sin_deg folds mirror angles to identical values") {
    for (double t : {0.0, 10.0, 37.0, 90.0, 135.5, 179.0}) {
        CHECK(sin_deg(t) == sin_deg(180.0 - t < 0 ? 180.0 - t + 360.0 : 180.0 - t));
    }
    CHECK(sin_deg(0.0) == 0.0);
    CHECK(sin_deg(180.0) == 0.0);
    CHECK(sin_deg(90.0) == 1.0);
    CHECK(sin_deg(270.0) == -1.0);
}
