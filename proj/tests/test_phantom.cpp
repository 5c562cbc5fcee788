#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "oracles.hpp"
#include "xrt/phantom.hpp"

using namespace xrt;
using std::numbers::pi;

namespace {
const double kSqrtPi = std::sqrt(pi);

Phantom two_gaussians() {
    return Phantom({{PrimitiveKind::gaussian, {1, 0, 0}, 1.0, 1.0}, {PrimitiveKind::gaussian, {-1, 0, 0}, 1.0, 1.0}});
}
}  // namespace

TEST_CASE("Phantom invariants") {
    CHECK_THROWS_AS(Phantom({{PrimitiveKind::gaussian, {0, 0, 0}, 0.0, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(Phantom({{PrimitiveKind::gaussian, {0, 0, 0}, 1.0, 1.0}}, 5.0), std::invalid_argument);
    const Phantom ph = two_gaussians();
    CHECK(ph.support_radius() == doctest::Approx(7.0));
    CHECK(ph.is_smooth());
    CHECK_FALSE(oracle::unit_ball().is_smooth());
    // Tail at the support boundary is below 1e-15 of the amplitude.
    CHECK(eval(oracle::unit_gaussian(), {6, 0, 0}) < 1e-15);
}

TEST_CASE("eval") {
    CHECK(eval(oracle::unit_gaussian(), {0, 0, 0}) == 1.0);
    CHECK(eval(oracle::unit_ball(), {0, 0, 2}) == 0.0);
    CHECK(eval(oracle::unit_ball(), {0, 0.5, 0}) == 1.0);
    CHECK(eval(two_gaussians(), {0, 0, 0}) == doctest::Approx(0.7357589).epsilon(1e-7));
}

TEST_CASE("halfline_integral closed forms") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 20; ++i) {
        const Direction3 n = oracle::random_direction(rng);
        CHECK(halfline_integral(oracle::unit_gaussian(), {0, 0, 0}, n) == doctest::Approx(kSqrtPi / 2).epsilon(1e-14));
        CHECK(halfline_integral(oracle::unit_ball(), {0, 0, 0}, n) == doctest::Approx(1.0).epsilon(1e-14));
    }
    CHECK(halfline_integral(oracle::unit_ball(), {-2, 0, 0}, Direction3(1, 0, 0)) == doctest::Approx(2.0));
    CHECK(halfline_integral(oracle::unit_ball(), {2, 0, 0}, Direction3(1, 0, 0)) == 0.0);
    CHECK(halfline_integral(oracle::unit_ball(), {0, 2, 0}, Direction3(1, 0, 0)) == 0.0);
}

TEST_CASE("plane_integral closed forms and evenness") {
    const Direction3 n = Direction3::normalized({1, 2, -2});
    CHECK(plane_integral(oracle::unit_gaussian(), n, 0.0) == doctest::Approx(pi).epsilon(1e-14));
    CHECK(plane_integral(oracle::unit_gaussian(), n, 1.0) == doctest::Approx(1.1557273).epsilon(1e-7));
    CHECK(plane_integral(oracle::unit_ball(), n, 0.0) == doctest::Approx(pi).epsilon(1e-14));
    CHECK(plane_integral(oracle::unit_ball(), n, 1.5) == 0.0);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> us(-3, 3);
    const Phantom ph({{PrimitiveKind::gaussian, {0.3, -0.2, 0.5}, 0.7, 1.3}, {PrimitiveKind::ball, {-0.5, 0, 0.2}, 0.8, 0.4}});
    for (int i = 0; i < 200; ++i) {
        const Direction3 d = oracle::random_direction(rng);
        const double s = us(rng);
        CHECK(std::abs(plane_integral(ph, d, s) - plane_integral(ph, -d, -s)) < 1e-12);
    }
}

TEST_CASE("plane_integral_derivative matches a difference quotient") {
    const Phantom ph({{PrimitiveKind::gaussian, {0.3, -0.2, 0.5}, 0.7, 1.3}});
    const Direction3 n = Direction3::normalized({0.2, 1, 0.3});
    for (double s : {-1.5, -0.2, 0.0, 0.7, 2.0}) {
        const double h = 1e-5;
        const double fd = (plane_integral(ph, n, s + h) - plane_integral(ph, n, s - h)) / (2 * h);
        CHECK(plane_integral_derivative(ph, n, s) == doctest::Approx(fd).epsilon(1e-8));
    }
}

TEST_CASE("linearity over primitives") {
    const Primitive a{PrimitiveKind::gaussian, {0.4, 0.1, -0.3}, 0.6, 1.1};
    const Primitive b{PrimitiveKind::ball, {-0.2, 0.5, 0.1}, 0.9, 0.7};
    const Phantom pa({a}), pb({b}), pab({a, b});
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int i = 0; i < 200; ++i) {
        const Vec3 x{u(rng), u(rng), u(rng)};
        const Direction3 n = oracle::random_direction(rng);
        const double s = u(rng);
        CHECK(std::abs(eval(pab, x) - eval(pa, x) - eval(pb, x)) < 1e-12);
        CHECK(std::abs(halfline_integral(pab, x, n) - halfline_integral(pa, x, n) - halfline_integral(pb, x, n)) <
              1e-12);
        CHECK(std::abs(plane_integral(pab, n, s) - plane_integral(pa, n, s) - plane_integral(pb, n, s)) < 1e-12);
    }
}

TEST_CASE("opposite half-lines add up to the full-line closed form") {
    // Full line through a Gaussian: A a sqrt(pi) exp(-d^2/a^2).
    const Primitive g{PrimitiveKind::gaussian, {0.4, -0.3, 0.2}, 0.8, 1.7};
    const Phantom ph({g});
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int i = 0; i < 200; ++i) {
        const Vec3 x{u(rng), u(rng), u(rng)};
        const Direction3 n = oracle::random_direction(rng);
        const Vec3 r = x - g.center;
        const double p = dot(n, r);
        const double d2 = dot(r, r) - p * p;
        const double full = g.amplitude * g.scale * kSqrtPi * std::exp(-d2 / (g.scale * g.scale));
        CHECK(std::abs(halfline_integral(ph, x, n) + halfline_integral(ph, x, -n) - full) < 1e-12);
    }
}

TEST_CASE("ray marching of eval reproduces halfline_integral") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    const Phantom ph = oracle::unit_gaussian();
    for (int i = 0; i < 10; ++i) {
        const Vec3 x{u(rng), u(rng), u(rng)};
        const Direction3 n = oracle::random_direction(rng);
        const double marched = oracle::ray_march(ph, x, n.vec(), 12.0, 1e-3);
        CHECK(std::abs(marched - halfline_integral(ph, x, n)) < 1e-5);
    }
}

TEST_CASE("rasterize") {
    SUBCASE("unit gaussian centre voxel") {
        const auto vol = rasterize(oracle::unit_gaussian(), VolumeGrid::spanning(-4, 4, 33));
        CHECK(vol.at(16, 16, 16) == 1.0);
    }
    SUBCASE("empty phantom") {
        const auto vol = rasterize(Phantom{}, VolumeGrid::spanning(-1, 1, 9));
        for (double v : vol.samples()) CHECK(v == 0.0);
    }
    SUBCASE("ball volume by voxel counting") {
        const auto grid = VolumeGrid::spanning(-1.2, 1.2, 65);
        const auto vol = rasterize(oracle::unit_ball(), grid);
        std::size_t inside = 0;
        for (double v : vol.samples()) inside += v == 1.0;
        const double h = grid.spacing().x;
        const double measured = static_cast<double>(inside) * h * h * h;
        CHECK(std::abs(measured - 4.0 * pi / 3.0) / (4.0 * pi / 3.0) < 0.05);
    }
    SUBCASE("grid too small") {
        CHECK_THROWS_AS(rasterize(oracle::unit_gaussian(), VolumeGrid::spanning(-2, 2, 9)), std::invalid_argument);
        CHECK_THROWS_AS(rasterize(oracle::unit_ball(), VolumeGrid::spanning(-0.9, 0.9, 9)), std::invalid_argument);
    }
}

TEST_CASE("phantom file grammar") {
    std::istringstream good(
        "# two blobs\n"
        "gaussian 1 0 0 1 1\n"
        "\n"
        "ball 0 0 -1 0.5 0.3   # trailing comment\n"
        "support_radius 8\n");
    const Phantom ph = parse_phantom(good);
    REQUIRE(ph.primitives().size() == 2);
    CHECK(ph.primitives()[1].kind == PrimitiveKind::ball);
    CHECK(ph.primitives()[1].center.z == -1.0);
    CHECK(ph.support_radius() == 8.0);

    std::ostringstream out;
    write_phantom(out, ph);
    std::istringstream back(out.str());
    const Phantom again = parse_phantom(back);
    CHECK(again.support_radius() == ph.support_radius());
    CHECK(again.primitives()[0].scale == ph.primitives()[0].scale);

    std::istringstream unknown("ellipsoid 0 0 0 1 1\n");
    CHECK_THROWS_WITH_AS(parse_phantom(unknown), doctest::Contains("unknown record kind"), std::invalid_argument);
    std::istringstream short_row("gaussian 0 0 1\n");
    CHECK_THROWS_WITH_AS(parse_phantom(short_row), doctest::Contains("line 1"), std::invalid_argument);
    std::istringstream negative("ball 0 0 0 -1 1\n");
    CHECK_THROWS_AS(parse_phantom(negative), std::invalid_argument);
    std::istringstream extra("gaussian 0 0 0 1 1 9\n");
    CHECK_THROWS_AS(parse_phantom(extra), std::invalid_argument);
    CHECK_THROWS_AS(load_phantom("/nonexistent/phantom.txt"), std::runtime_error);
}
