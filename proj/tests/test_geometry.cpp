#include "hpmod/error.hpp"
#include "hpmod/geometry.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace hpmod;

namespace {

ErrorCode code_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error thrown");
    return ErrorCode::InvalidParameter;
}

QuadrilateralSpec unit_square() {
    return polygon_quad({Point2{0, 0}, Point2{1, 0}, Point2{1, 1}, Point2{0, 1}});
}

}  // namespace

TEST_CASE("polygon quadrilateral basics") {
    const auto q = unit_square();
    CHECK(q.pieces.size() == 4);
    CHECK(signed_area(q) == doctest::Approx(1.0));
    CHECK(scale(q) == doctest::Approx(std::sqrt(2.0)));
    const auto c = corner_centroid(q);
    CHECK(c.x == doctest::Approx(0.5));
    CHECK(c.y == doctest::Approx(0.5));
    for (int j = 0; j < 4; ++j) CHECK(interior_angle(q, j) == doctest::Approx(std::numbers::pi / 2));
    CHECK(point_inside(q, {0.3, 0.4}));
    CHECK_FALSE(point_inside(q, {1.3, 0.4}));
    CHECK(code_of([&] { point_inside(q, {1.0, 0.5}); }) == ErrorCode::OnBoundary);
}

TEST_CASE("invalid polygons are rejected") {
    // clockwise
    CHECK(code_of([] { polygon_quad({Point2{0, 0}, Point2{0, 1}, Point2{1, 1}, Point2{1, 0}}); }) ==
          ErrorCode::InvalidGeometry);
    // bow tie
    CHECK(code_of([] { polygon_quad({Point2{0, 0}, Point2{1, 1}, Point2{1, 0}, Point2{0, 1}}); }) ==
          ErrorCode::InvalidGeometry);
}

TEST_CASE("conjugate shifts the corners") {
    const auto q = unit_square();
    const auto c = conjugate(q);
    for (int j = 0; j < 4; ++j) {
        CHECK(distance(c.corners[j], q.corners[(j + 1) % 4]) < 1e-15);
    }
}

TEST_CASE("reflex corner angle") {
    const auto q = preset_quad("B");
    double total = 0.0;
    for (int j = 0; j < 4; ++j) total += interior_angle(q, j);
    CHECK(total == doctest::Approx(2 * std::numbers::pi));
}

TEST_CASE("circle through three points") {
    const auto c = circle_through({1, 0}, {0, 1}, {-1, 0});
    CHECK(std::abs(c.center.x) < 1e-15);
    CHECK(std::abs(c.center.y) < 1e-15);
    CHECK(c.radius == doctest::Approx(1.0));
    CHECK(code_of([] { circle_through({0, 0}, {1, 1}, {2, 2}); }) == ErrorCode::Collinear);
}

TEST_CASE("inversion is an involution") {
    const Point2 c{0.3, -0.2};
    const Point2 z{2.5, 1.25};
    const auto w = invert(invert(z, c), c);
    CHECK(distance(w, z) < 1e-14);
    CHECK(code_of([&] { invert(c, c); }) == ErrorCode::Pole);
    // the unit circle is fixed under inversion about the origin
    const auto u = invert(polar(1.0, 0.7), {0, 0});
    CHECK(norm(u) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("inverted pieces follow the image of the curve") {
    const Point2 c{0.5, 0.5};
    const BoundaryPiece seg = Segment{{0, 0}, {1, 0}};
    const auto img = invert_piece(seg, c);
    for (double s : {0.0, 0.25, 0.5, 0.9, 1.0}) {
        const auto w = piece_point(img, s);
        const auto z = invert(w, c);
        CHECK(std::abs(z.y) < 1e-13);
        CHECK(z.x >= -1e-13);
        CHECK(z.x <= 1.0 + 1e-13);
    }
}

TEST_CASE("inverted square") {
    const auto q = unit_square();
    const auto inv = invert_quadrilateral(q, corner_centroid(q));
    CHECK(distance(inv.image_of_infinity, corner_centroid(q)) < 1e-15);
    CHECK(signed_area(inv.image) > 0.0);
    for (int j = 0; j < 4; ++j) CHECK(interior_angle(inv.image, j) == doctest::Approx(1.5 * std::numbers::pi));
    CHECK(code_of([&] { invert_quadrilateral(q, {2.0, 2.0}); }) == ErrorCode::InvalidCenter);
}

TEST_CASE("rectangle on the unit circle") {
    const double t = std::numbers::pi / 5;
    const auto q = rect_on_circle(t);
    for (const auto& z : q.corners) CHECK(norm(z) == doctest::Approx(1.0));
    CHECK(rect_on_circle_interior_modulus(t) == doctest::Approx(std::tan(t / 2)));
    CHECK(code_of([] { rect_on_circle(0.0); }) == ErrorCode::Domain);
    CHECK(code_of([] { rect_on_circle(2.0); }) == ErrorCode::Domain);
}

TEST_CASE("side sliding trapezoid") {
    const auto q = side_slide_quad(1.0, 2.0, 1.5);
    CHECK(distance(q.corners[2], {1.5, 1.0}) < 1e-15);
    CHECK(distance(q.corners[3], {-0.5, 1.0}) < 1e-15);
    CHECK(code_of([] { side_slide_quad(-1.0, 2.0, 1.5); }) == ErrorCode::InvalidGeometry);
}

TEST_CASE("flower curve") {
    FlowerCurve f(4);
    CHECK(f.radius(0.0) == doctest::Approx(1.0));
    CHECK(f.radius(0.25) == doctest::Approx(0.6));
    const double h = 1e-6;
    for (double t : {-0.7, 0.1, 0.33}) {
        const auto d = (f.eval(t + h) - f.eval(t - h)) / (2 * h);
        CHECK(distance(d, f.derivative(t)) < 1e-7);
    }
    CHECK(code_of([] { flower_quad(3); }) == ErrorCode::UnsupportedParameter);
    const auto q = flower_quad(8);
    CHECK(q.pieces.size() == 4);
    CHECK(signed_area(q) > 0.0);
}

TEST_CASE("presets") {
    for (const char* name : {"A", "B", "C", "D"}) {
        CAPTURE(name);
        CHECK_NOTHROW(preset_quad(name));
    }
    CHECK(code_of([] { preset_quad("E"); }) == ErrorCode::InvalidParameter);
    const auto a = preset_quad("A");
    CHECK(distance(a.corners[2], {1.12, 1.38}) < 1e-15);
}
