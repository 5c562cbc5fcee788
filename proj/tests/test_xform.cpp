#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "oracles.hpp"
#include "xrt/xform.hpp"

using namespace xrt;
using std::numbers::pi;

namespace {
const double kSqrtPi = std::sqrt(pi);
}

TEST_CASE("xray analytic examples") {
    const Phantom g = oracle::unit_gaussian();
    CHECK(xray(g, {0, 0, 0}, Direction3(0, 1, 0)) == doctest::Approx(0.8862269).epsilon(1e-7));
    CHECK(xray(g, {0, 0, 10}, Direction3(0, 0, 1)) < 1e-15);
    CHECK(xray(g, {1, 0, 0}, Direction3(0, 1, 0)) == doctest::Approx(kSqrtPi / 2 / std::exp(1.0)).epsilon(1e-12));
    CHECK(analytic_xray(g)({1, 0, 0}, Direction3(0, 1, 0)) == xray(g, {1, 0, 0}, Direction3(0, 1, 0)));
}

TEST_CASE("xray_numeric") {
    SUBCASE("rasterized gaussian") {
        const auto vol = rasterize(oracle::unit_gaussian(), VolumeGrid::spanning(-4, 4, 129));
        const double v = xray_numeric(vol, {0, 0, 0}, Direction3::normalized({1, 0.3, -0.2}), 1e-2);
        CHECK(std::abs(v - kSqrtPi / 2) < 2e-3);
    }
    SUBCASE("zero and constant volumes") {
        const auto zero = VolumeGrid::spanning(-1, 1, 9);
        CHECK(xray_numeric(zero, {0, 0, 0}, Direction3(1, 0, 0), 1e-2) == 0.0);
        auto ones = VolumeGrid::spanning(-1, 1, 9);
        for (auto& v : ones.samples()) v = 1.0;
        CHECK(std::abs(xray_numeric(ones, {0, 0, 0}, Direction3(1, 0, 0), 1e-3) - 1.0) < 2e-3);
        // Starting outside and pointing away.
        CHECK(xray_numeric(ones, {3, 0, 0}, Direction3(1, 0, 0), 1e-3) == 0.0);
        // Starting outside and crossing the whole box.
        CHECK(std::abs(xray_numeric(ones, {-3, 0, 0}, Direction3(1, 0, 0), 1e-3) - 2.0) < 2e-3);
        CHECK_THROWS_AS(xray_numeric(ones, {0, 0, 0}, Direction3(1, 0, 0), 0.0), std::invalid_argument);
    }
    SUBCASE("second-order convergence on a trilinear-exact field") {
        // f = 1 + xyz is reproduced exactly by trilinear interpolation; along
        // the diagonal from the origin it is the cubic 1 + t^3/(3 sqrt 3),
        // integrated exactly by a single Simpson panel.
        auto vol = VolumeGrid::spanning(-1, 1, 9);
        for (std::size_t i = 0; i < vol.size(); ++i) {
            const Vec3 p = vol.position(i);
            vol.samples()[i] = 1.0 + p.x * p.y * p.z;
        }
        const Direction3 n = Direction3::normalized({1, 1, 1});
        const double L = std::sqrt(3.0);
        auto f = [&](double t) { return 1.0 + std::pow(t / L, 3); };
        const double exact = L / 6.0 * (f(0) + 4 * f(L / 2) + f(L));
        const double e1 = std::abs(xray_numeric(vol, {0, 0, 0}, n, 4e-2) - exact);
        const double e2 = std::abs(xray_numeric(vol, {0, 0, 0}, n, 2e-2) - exact);
        const double e3 = std::abs(xray_numeric(vol, {0, 0, 0}, n, 1e-2) - exact);
        CHECK(std::log2(e1 / e2) >= 1.8);
        CHECK(std::log2(e2 / e3) >= 1.8);
    }
}

TEST_CASE("line_transform") {
    std::mt19937_64 rng(31);
    const Direction3 n = oracle::random_direction(rng);
    CHECK(line_transform(oracle::unit_gaussian(), {0, 0, 0}, n) == doctest::Approx(kSqrtPi).epsilon(1e-14));
    CHECK(line_transform(oracle::unit_ball(), {0, 0, 0}, n) == doctest::Approx(2.0).epsilon(1e-14));
    const Phantom ph({{PrimitiveKind::gaussian, {0.3, 0.2, -0.1}, 0.7, 1.0}});
    std::uniform_real_distribution<double> u(-2, 2);
    for (int i = 0; i < 50; ++i) {
        const Vec3 x{u(rng), u(rng), u(rng)};
        const Direction3 d = oracle::random_direction(rng);
        CHECK(line_transform(ph, x, d) == line_transform(ph, x, -d));
        CHECK(line_transform(ph, x, d) == xray(ph, x, d) + xray(ph, x, -d));
        // Full line marched numerically from far behind x.
        const double marched = oracle::ray_march(ph, x - d.vec() * 10.0, d.vec(), 20.0, 1e-3);
        CHECK(std::abs(marched - line_transform(ph, x, d)) < 1e-4);
    }
}

TEST_CASE("radon_profile") {
    const ProfileGrid grid{-4, 4, 81};
    const Phantom g = oracle::unit_gaussian();
    const auto a = radon_profile(g, Direction3(0, 0, 1), grid);
    CHECK(a.values[40] == doctest::Approx(pi).epsilon(1e-14));

    std::mt19937_64 rng(37);
    const auto b = radon_profile(g, oracle::random_direction(rng), grid);
    for (std::size_t k = 0; k < grid.count; ++k) CHECK(std::abs(a.values[k] - b.values[k]) < 1e-12);

    // Translating the Gaussian by c shifts the profile by n.c.
    const Vec3 c{0.5, -0.3, 0.2};
    const Direction3 n = Direction3::normalized({1, 2, 3});
    const Phantom moved({{PrimitiveKind::gaussian, c, 1.0, 1.0}});
    const auto shifted = radon_profile(moved, n, grid);
    for (std::size_t k = 0; k < grid.count; ++k) {
        CHECK(std::abs(shifted.values[k] - plane_integral(g, n, grid.at(k) - dot(n, c))) < 1e-12);
    }
    CHECK_THROWS_AS(radon_profile(g, n, {0, 1, 1}), std::invalid_argument);

    // Integral over s recovers the total mass A a^3 pi^(3/2).
    const Phantom w({{PrimitiveKind::gaussian, {0.2, 0.1, 0}, 0.8, 1.5}});
    const ProfileGrid wide = {-w.support_radius(), w.support_radius(), 2001};
    const auto p = radon_profile(w, n, wide);
    double sum = 0.5 * (p.values.front() + p.values.back());
    for (std::size_t k = 1; k + 1 < p.values.size(); ++k) sum += p.values[k];
    sum *= wide.step();
    CHECK(std::abs(sum - 1.5 * std::pow(0.8, 3) * pi * kSqrtPi) < 1e-6);
    CHECK(std::abs(total_integral(w) - 1.5 * std::pow(0.8, 3) * pi * kSqrtPi) < 1e-12);
}

TEST_CASE("directional derivative of X-ray data") {
    const Phantom g = oracle::unit_gaussian();
    std::mt19937_64 rng(41);
    const Direction3 n = oracle::random_direction(rng);
    CHECK(std::abs(directional_derivative_xray(g, {0, 0, 0}, n, 1e-4) + 1.0) < 1e-6);
    CHECK(std::abs(directional_derivative_xray(g, {0, 0, 10}, n, 1e-4)) < 1e-9);
    const double one = directional_derivative_xray(g, {0.3, 0.1, 0}, n, 1e-4);
    const double two = directional_derivative_xray(oracle::unit_gaussian(2.0), {0.3, 0.1, 0}, n, 1e-4);
    CHECK(std::abs(two - 2.0 * one) < 1e-12);
    CHECK(directional_derivative(analytic_xray(g), {0.3, 0.1, 0}, n, 1e-4) == one);
    CHECK_THROWS_AS(directional_derivative_xray(g, {0, 0, 0}, n, 0.0), std::invalid_argument);
    CHECK(default_diff_step(g) == doctest::Approx(6e-4));
}

TEST_CASE("transport equation residual on random interior points") {
    // Phi(x) = -X f(x, n) solves n.grad Phi = f.
    const Phantom ph({{PrimitiveKind::gaussian, {0.3, -0.2, 0.1}, 0.9, 1.0},
                      {PrimitiveKind::gaussian, {-0.6, 0.4, 0.2}, 0.6, 0.5}});
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int i = 0; i < 100; ++i) {
        const Vec3 x{u(rng), u(rng), u(rng)};
        const Direction3 n = oracle::random_direction(rng);
        const double residual = -directional_derivative_xray(ph, x, n, 1e-4) - eval(ph, x);
        CHECK(std::abs(residual) < 1e-5);
    }
}

TEST_CASE("CSV exports") {
    const Phantom g = oracle::unit_gaussian();
    std::vector<XRayDatum> rows{{{0, 0, 0}, Direction3(1, 0, 0), xray(g, {0, 0, 0}, Direction3(1, 0, 0))},
                                {{0.5, 0.25, -1}, Direction3(0, 0, -1), xray(g, {0.5, 0.25, -1}, Direction3(0, 0, -1))}};
    std::stringstream xs;
    write_xray_csv(xs, rows);
    CHECK(xs.str().rfind("x1,x2,x3,n1,n2,n3,value\n", 0) == 0);
    const auto back = read_xray_csv(xs);
    REQUIRE(back.size() == 2);
    CHECK(back[1].value == rows[1].value);
    CHECK(back[1].x == rows[1].x);

    const auto prof = radon_profile(g, Direction3::normalized({1, 1, 0}), {-3, 3, 61});
    std::stringstream ps;
    write_profile_csv(ps, prof);
    CHECK(ps.str().rfind("n1,n2,n3,s,value\n", 0) == 0);
    const auto pb = read_profile_csv(ps);
    CHECK(pb.values == prof.values);
    CHECK(pb.grid.count == 61);

    std::stringstream bad("s,value\n0,1\n");
    CHECK_THROWS_AS(read_profile_csv(bad), std::invalid_argument);
}
