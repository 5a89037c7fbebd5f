#include "hpmod/error.hpp"
#include "hpmod/modulus.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace hpmod;

namespace {

SolveOptions desk(int p) {
    SolveOptions o;
    o.p_max = p;
    return o;
}

// Unit circle with corners at the given angles (counterclockwise).
QuadrilateralSpec circle_quad(const std::array<double, 4>& angles) {
    std::vector<BoundaryPiece> pieces;
    std::array<Point2, 4> corners{};
    for (int j = 0; j < 4; ++j) {
        double sweep = angles[(j + 1) % 4] - angles[j];
        if (sweep <= 0) sweep += 2 * std::numbers::pi;
        pieces.emplace_back(CircularArc{{0, 0}, 1.0, angles[j], sweep});
        corners[j] = polar(1.0, angles[j]);
    }
    return make_quadrilateral(std::move(pieces), corners);
}

}  // namespace

TEST_CASE("options") {
    SolveOptions o;
    CHECK(o.effective_nu() == 12);
    o.p_max = 20;
    CHECK(o.effective_nu() == 16);
    o.nu = 3;
    CHECK(o.effective_nu() == 3);
    o.alpha = 1.0;
    CHECK_THROWS_AS(o.validate(), Error);
    CHECK_THROWS_AS(interior_modulus(preset_quad("A"), desk(21)), Error);
}

TEST_CASE("rectangle modulus is exact") {
    const auto q = polygon_quad({Point2{0, 0}, Point2{3, 0}, Point2{3, 1}, Point2{0, 1}});
    const auto r = interior_modulus(q, desk(2));
    CHECK(r.modulus == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(*r.conjugate == doctest::Approx(1.0 / 3).epsilon(1e-12));
    CHECK(*r.reciprocal_error < 1e-12);
    const auto c = conjugate_modulus(q, desk(2));
    CHECK(c.modulus == doctest::Approx(1.0 / 3).epsilon(1e-12));
    CHECK(*c.conjugate == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("rectangle on the circle, interior") {
    const double t = std::numbers::pi / 3;
    const auto r = interior_modulus(rect_on_circle(t), desk(8));
    CHECK(r.modulus == doctest::Approx(std::tan(t / 2)).epsilon(1e-9));
}

TEST_CASE("disk quadrilateral") {
    // cross-ratio value for corners at -pi, -pi/4, 0, pi/2
    const double exact = 0.81964418848050702;
    const auto q = circle_quad({-std::numbers::pi, -std::numbers::pi / 4, 0.0, std::numbers::pi / 2});
    const auto r = conjugate_modulus(q, desk(12));
    CHECK(r.modulus == doctest::Approx(exact).epsilon(1e-8));
    const auto flower = conjugate_modulus(preset_quad("C"), desk(12));
    CHECK(flower.modulus == doctest::Approx(exact).epsilon(1e-7));
}

TEST_CASE("exterior of a square") {
    const auto q = polygon_quad({Point2{0, 0}, Point2{1, 0}, Point2{1, 1}, Point2{0, 1}});
    const auto r = exterior_modulus_inversion(q, desk(12));
    CHECK(std::abs(r.modulus - 1.0) < 1e-6);
    CHECK(std::abs(*r.far_field - 0.5) < 1e-9);
    CHECK(*r.reciprocal_error < 1e-6);
    CHECK(r.timings.total >= r.timings.solve);

    SolveOptions o = desk(6);
    o.radius = 1e4;
    const auto t = exterior_modulus_truncated(q, o);
    CHECK(std::abs(t.modulus - r.modulus) < 1e-3);
    CHECK(std::abs(*t.far_field - 0.5) < 1e-3);

    o.radius = 5.0;
    CHECK_THROWS_AS(exterior_modulus_truncated(q, o), Error);
}

TEST_CASE("exterior modulus does not depend on the inversion centre") {
    const auto q = preset_quad("A");
    SolveOptions a = desk(8), b = desk(8), c = desk(8);
    b.center = Point2{0.3, 0.5};
    c.center = Point2{0.1, 0.7};
    const auto ra = exterior_modulus_inversion(q, a);
    const double bound = 10 * *ra.reciprocal_error;
    CHECK(std::abs(ra.modulus - exterior_modulus_inversion(q, b).modulus) < bound);
    CHECK(std::abs(ra.modulus - exterior_modulus_inversion(q, c).modulus) < bound);
}

TEST_CASE("moduli are invariant under similarity") {
    const auto a = preset_quad("A");
    std::array<Point2, 4> v{};
    for (int j = 0; j < 4; ++j) v[j] = 3.5 * a.corners[j] + Point2{-2.0, 7.0};
    const auto r1 = interior_modulus(a, desk(6));
    const auto r2 = interior_modulus(polygon_quad(v), desk(6));
    CHECK(std::abs(r1.modulus - r2.modulus) < 1e-10);
}

TEST_CASE("flower interior and exterior moduli agree") {
    const auto f = flower_capacity_invariance(4, desk(8));
    CHECK(std::abs(f.interior - f.exterior) < 1e-5);
}
