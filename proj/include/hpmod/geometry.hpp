#pragma once

// Quadrilateral domains: boundary pieces (segments, circular arcs, parametric
// curves), the Kelvin-type inversion z -> c + (z - c)/|z - c|^2 that maps an
// exterior domain onto a bounded one, and the domain families used in the
// experiments (rectangles on the unit circle, side-sliding trapezoids, flower
// domains, the polygonal presets A and B).

#include <array>
#include <cmath>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace hpmod {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    Point2& operator+=(const Point2& o) { x += o.x; y += o.y; return *this; }
    Point2& operator-=(const Point2& o) { x -= o.x; y -= o.y; return *this; }
    Point2& operator*=(double s) { x *= s; y *= s; return *this; }
};

inline Point2 operator+(Point2 a, const Point2& b) { return a += b; }
inline Point2 operator-(Point2 a, const Point2& b) { return a -= b; }
inline Point2 operator-(const Point2& a) { return {-a.x, -a.y}; }
inline Point2 operator*(Point2 a, double s) { return a *= s; }
inline Point2 operator*(double s, Point2 a) { return a *= s; }
inline Point2 operator/(const Point2& a, double s) { return {a.x / s, a.y / s}; }
inline double dot(const Point2& a, const Point2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Point2& a, const Point2& b) { return a.x * b.y - a.y * b.x; }
inline double norm2(const Point2& a) { return dot(a, a); }
inline double norm(const Point2& a) { return std::hypot(a.x, a.y); }
inline double distance(const Point2& a, const Point2& b) { return norm(a - b); }
/// Twice the signed area of (a, b, c); positive for counterclockwise order.
inline double orient(const Point2& a, const Point2& b, const Point2& c) {
    return cross(b - a, c - a);
}
inline Point2 polar(double r, double angle) { return {r * std::cos(angle), r * std::sin(angle)}; }

/// A smooth plane curve t -> gamma(t) with its derivative.
class Curve {
public:
    virtual ~Curve() = default;
    virtual Point2 eval(double t) const = 0;
    virtual Point2 derivative(double t) const = 0;
    virtual std::string describe() const = 0;
};

/// gamma(t) = r(t) e^{i pi t}, r(t) = 4/5 + (1/5) cos(n pi t), t in [-1, 1].
class FlowerCurve final : public Curve {
public:
    explicit FlowerCurve(int n);

    int petals() const noexcept { return n_; }
    double radius(double t) const;
    Point2 eval(double t) const override;
    Point2 derivative(double t) const override;
    std::string describe() const override;

private:
    int n_;
};

/// Image of a curve under z -> c + (z - c)/|z - c|^2.
class InvertedCurve final : public Curve {
public:
    InvertedCurve(std::shared_ptr<const Curve> base, Point2 center);

    Point2 eval(double t) const override;
    Point2 derivative(double t) const override;
    std::string describe() const override;

private:
    std::shared_ptr<const Curve> base_;
    Point2 center_;
};

struct Segment {
    Point2 p;
    Point2 q;
};

/// Arc of the circle |z - center| = radius from start_angle through a signed
/// sweep; positive sweep runs counterclockwise.
struct CircularArc {
    Point2 center;
    double radius = 1.0;
    double start_angle = 0.0;
    double sweep = 0.0;
};

struct ParametricArc {
    std::shared_ptr<const Curve> curve;
    double t0 = 0.0;
    double t1 = 1.0;
};

using BoundaryPiece = std::variant<Segment, CircularArc, ParametricArc>;

/// Every piece is parametrised over s in [0, 1].
Point2 piece_point(const BoundaryPiece& piece, double s);
/// d/ds of piece_point.
Point2 piece_derivative(const BoundaryPiece& piece, double s);
inline Point2 piece_start(const BoundaryPiece& piece) { return piece_point(piece, 0.0); }
inline Point2 piece_end(const BoundaryPiece& piece) { return piece_point(piece, 1.0); }
bool is_straight(const BoundaryPiece& piece);
double piece_length(const BoundaryPiece& piece);
BoundaryPiece reversed(const BoundaryPiece& piece);
void validate_piece(const BoundaryPiece& piece);
std::string describe(const BoundaryPiece& piece);

/// Positively oriented Jordan boundary with four distinguished points at piece
/// junctions. Arc j ("part" j) runs from corners[j] to corners[(j+1) % 4].
/// Build through make_quadrilateral, which validates the invariants.
struct QuadrilateralSpec {
    std::vector<BoundaryPiece> pieces;
    std::array<Point2, 4> corners;
    /// Index of the piece that starts at corners[j].
    std::array<int, 4> corner_piece{};
    /// part_of_piece[i] = arc index 0..3 that piece i belongs to.
    std::vector<int> part_of_piece;
};

QuadrilateralSpec make_quadrilateral(std::vector<BoundaryPiece> pieces,
                                     const std::array<Point2, 4>& corners);
QuadrilateralSpec polygon_quad(const std::array<Point2, 4>& vertices);
/// (z2, z3, z4, z1): the conjugate quadrilateral.
QuadrilateralSpec conjugate(const QuadrilateralSpec& quad);

double signed_area(const QuadrilateralSpec& quad);
/// Bounding-box diagonal; geometric tolerances are relative to it.
double scale(const QuadrilateralSpec& quad);
Point2 corner_centroid(const QuadrilateralSpec& quad);
/// Opening angle of the domain at corner j, in (0, 2 pi].
double interior_angle(const QuadrilateralSpec& quad, int j);
/// Distance from z to the boundary.
double boundary_distance(const QuadrilateralSpec& quad, const Point2& z);

struct Circle {
    Point2 center;
    double radius = 0.0;
};

Circle circle_through(const Point2& p1, const Point2& p2, const Point2& p3);
Point2 invert(const Point2& z, const Point2& c);
BoundaryPiece invert_piece(const BoundaryPiece& piece, const Point2& c);

struct InversionResult {
    QuadrilateralSpec image;
    Point2 image_of_infinity;
};

/// Bounded image of the exterior of `quad` under inversion about the interior
/// point c. Corner j of the image is invert(corners[j], c); the inversion keeps
/// the angular order around c, so the image is positively oriented with the
/// same corner sequence.
InversionResult invert_quadrilateral(const QuadrilateralSpec& quad, const Point2& c);

/// Winding-number test. Throws Error{OnBoundary} within 1e-12 * scale.
bool point_inside(const QuadrilateralSpec& quad, const Point2& z);

/// Rectangle with vertices 1, e^{it}, -1, -e^{it}, 0 < t <= pi/2.
QuadrilateralSpec rect_on_circle(double t);
/// tan(t/2): modulus of the family joining [1, e^{it}] and [-1, -e^{it}].
double rect_on_circle_interior_modulus(double t);
/// Polygon with vertices 0, 1, t + ih, t - s + ih.
QuadrilateralSpec side_slide_quad(double h, double s, double t);
/// Flower domain with corners at t = -1, -1/4, 0, 1/2; n must be even.
QuadrilateralSpec flower_quad(int n);
/// Named presets: "A", "B" (polygons), "C", "D" (flowers n = 4, 8).
QuadrilateralSpec preset_quad(const std::string& name);

}  // namespace hpmod
