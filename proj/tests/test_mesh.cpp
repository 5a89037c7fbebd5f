#include "hpmod/error.hpp"
#include "hpmod/geometry.hpp"
#include "hpmod/mesh.hpp"

#include <doctest.h>

#include <algorithm>
#include <sstream>

using namespace hpmod;

namespace {

QuadrilateralSpec unit_square() {
    return polygon_quad({Point2{0, 0}, Point2{1, 0}, Point2{1, 1}, Point2{0, 1}});
}

double min_layer_size(const Mesh& m) {
    double best = 1e300;
    for (int t = 0; t < int(m.triangles.size()); ++t) {
        if (m.layer[t] != 0) continue;
        const auto& tri = m.triangles[t];
        for (int i = 0; i < 3; ++i) {
            best = std::min(best, distance(m.vertices[tri[i]], m.vertices[tri[(i + 1) % 3]]));
        }
    }
    return best;
}

}  // namespace

TEST_CASE("initial mesh of a square") {
    const auto m = initial_mesh(unit_square());
    CHECK_NOTHROW(validate(m));
    for (int j = 0; j < 4; ++j) CHECK(vertex_degree(m, m.corners[j]) == 1);
    for (const auto& e : m.boundary_edges) {
        const auto expected = interior_conditions()[e.part];
        CHECK(e.tag == expected);
        CHECK_FALSE(e.curve.has_value());
    }
}

TEST_CASE("corner valence follows the opening angle") {
    const auto q = unit_square();
    const auto inv = invert_quadrilateral(q, corner_centroid(q));
    const auto m = initial_mesh(inv.image);
    CHECK_NOTHROW(validate(m));
    for (int j = 0; j < 4; ++j) CHECK(vertex_degree(m, m.corners[j]) == 3);

    const auto b = initial_mesh(preset_quad("B"));
    CHECK_NOTHROW(validate(b));
}

TEST_CASE("curved boundaries carry their curve") {
    const auto m = initial_mesh(preset_quad("C"));
    CHECK_NOTHROW(validate(m));
    for (const auto& e : m.boundary_edges) {
        REQUIRE(e.curve.has_value());
        CHECK(distance(e.curve->point(0.0), m.vertices[e.v0]) < 1e-12);
        CHECK(distance(e.curve->point(1.0), m.vertices[e.v1]) < 1e-12);
    }
}

TEST_CASE("geometric refinement") {
    const auto m0 = initial_mesh(unit_square());
    const auto m1 = refine(m0, {0.15, 1});
    const auto m3 = refine(m0, {0.15, 3});
    CHECK_NOTHROW(validate(m3));
    CHECK(m3.triangles.size() > m1.triangles.size());
    CHECK(m1.triangles.size() > m0.triangles.size());
    // each level shrinks the corner elements by alpha
    CHECK(min_layer_size(m3) / min_layer_size(m1) == doctest::Approx(0.15 * 0.15).epsilon(0.05));
    const int max_layer = *std::max_element(m3.layer.begin(), m3.layer.end());
    CHECK(max_layer == 3);
}

TEST_CASE("degree distributions") {
    const auto m = refine(initial_mesh(unit_square()), {0.15, 4});
    const auto c = assign_degrees(m, DegreeKind::Constant, 6);
    CHECK(std::all_of(c.element_degree.begin(), c.element_degree.end(), [](int p) { return p == 6; }));
    const auto g = assign_degrees(m, DegreeKind::Graded, 6);
    for (int t = 0; t < int(m.triangles.size()); ++t) {
        const int expected = m.layer[t] < 0 ? 6 : std::min(6, 1 + m.layer[t]);
        CHECK(g.element_degree[t] == expected);
    }
}

TEST_CASE("boundary conditions can be replaced") {
    const auto m = with_conditions(initial_mesh(unit_square()), conjugate_conditions());
    for (const auto& e : m.boundary_edges) CHECK(e.tag == conjugate_conditions()[e.part]);
    std::ostringstream os;
    write_mesh(os, m);
    CHECK(os.str().find("v ") == 0);
}

TEST_CASE("truncated exterior mesh") {
    TruncationOptions trunc;
    trunc.radius = 100.0;
    const auto m = truncated_exterior_mesh(unit_square(), trunc);
    CHECK_NOTHROW(validate(m));
    bool outer = false;
    for (const auto& e : m.boundary_edges) {
        if (e.part == kOuterPart) {
            outer = true;
            CHECK(e.tag == EdgeTag::Neumann);
            CHECK(norm(m.vertices[e.v0] - Point2{0.5, 0.5}) == doctest::Approx(100.0));
        }
    }
    CHECK(outer);
}
