#include "hpmod/geometry.hpp"

#include "hpmod/error.hpp"
#include "hpmod/quadrature.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <sstream>

namespace hpmod {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Angle in [0, 2 pi).
double wrap_positive(double a) {
    a = std::fmod(a, kTwoPi);
    if (a < 0.0) a += kTwoPi;
    return a;
}

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double bbox_diagonal(const std::vector<Point2>& pts) {
    double xmin = std::numeric_limits<double>::infinity();
    double ymin = xmin;
    double xmax = -xmin;
    double ymax = -xmin;
    for (const auto& p : pts) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    return std::hypot(xmax - xmin, ymax - ymin);
}

std::vector<Point2> sample_boundary(const QuadrilateralSpec& quad, int per_piece) {
    std::vector<Point2> pts;
    for (const auto& piece : quad.pieces) {
        for (int i = 0; i < per_piece; ++i) pts.push_back(piece_point(piece, double(i) / per_piece));
    }
    return pts;
}

double distance_to_segment(const Point2& z, const Point2& a, const Point2& b) {
    const Point2 d = b - a;
    const double len2 = norm2(d);
    double t = len2 > 0.0 ? dot(z - a, d) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return distance(z, a + d * t);
}

double distance_to_piece(const BoundaryPiece& piece, const Point2& z) {
    return std::visit(
        overloaded{
            [&](const Segment& s) { return distance_to_segment(z, s.p, s.q); },
            [&](const CircularArc& a) {
                const double ang = std::atan2(z.y - a.center.y, z.x - a.center.x);
                // Position of ang along the sweep, in sweep units.
                double rel = a.sweep >= 0.0 ? wrap_positive(ang - a.start_angle)
                                            : wrap_positive(a.start_angle - ang);
                double best = std::min(distance(z, piece_point(piece, 0.0)),
                                       distance(z, piece_point(piece, 1.0)));
                if (rel <= std::abs(a.sweep)) {
                    best = std::min(best, std::abs(distance(z, a.center) - a.radius));
                }
                return best;
            },
            [&](const ParametricArc&) {
                constexpr int n = 256;
                double best = std::numeric_limits<double>::infinity();
                int best_i = 0;
                for (int i = 0; i <= n; ++i) {
                    const double d = distance(z, piece_point(piece, double(i) / n));
                    if (d < best) {
                        best = d;
                        best_i = i;
                    }
                }
                // Golden-section polish around the best sample.
                double lo = std::max(0.0, (best_i - 1.0) / n);
                double hi = std::min(1.0, (best_i + 1.0) / n);
                const double g = 0.5 * (std::sqrt(5.0) - 1.0);
                for (int it = 0; it < 60; ++it) {
                    const double m1 = hi - g * (hi - lo);
                    const double m2 = lo + g * (hi - lo);
                    if (distance(z, piece_point(piece, m1)) < distance(z, piece_point(piece, m2))) {
                        hi = m2;
                    } else {
                        lo = m1;
                    }
                }
                return std::min(best, distance(z, piece_point(piece, 0.5 * (lo + hi))));
            },
        },
        piece);
}

// Accumulated turning of arg(z - p) along the piece, sampled finely enough
// that no single step exceeds a quarter turn.
double winding_of_piece(const BoundaryPiece& piece, const Point2& z) {
    double total = 0.0;
    const int base = 64;
    struct Span {
        double s0, s1;
        int depth;
    };
    std::vector<Span> stack;
    for (int i = base - 1; i >= 0; --i) stack.push_back({double(i) / base, double(i + 1) / base, 0});
    while (!stack.empty()) {
        const Span sp = stack.back();
        stack.pop_back();
        const Point2 a = piece_point(piece, sp.s0) - z;
        const Point2 b = piece_point(piece, sp.s1) - z;
        const double step = std::atan2(cross(a, b), dot(a, b));
        if (std::abs(step) > 0.25 * kPi && sp.depth < 40) {
            const double mid = 0.5 * (sp.s0 + sp.s1);
            stack.push_back({mid, sp.s1, sp.depth + 1});
            stack.push_back({sp.s0, mid, sp.depth + 1});
            continue;
        }
        total += step;
    }
    return total;
}

bool segments_cross(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
    const double d1 = orient(c, d, a);
    const double d2 = orient(c, d, b);
    const double d3 = orient(a, b, c);
    const double d4 = orient(a, b, d);
    return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 &&
           d4 != 0;
}

}  // namespace

// ---------------------------------------------------------------------------
// Curves

FlowerCurve::FlowerCurve(int n) : n_(n) {
    if (n < 1) throw Error(ErrorCode::InvalidParameter, "FlowerCurve: n must be positive");
}

double FlowerCurve::radius(double t) const {
    return 0.8 + 0.2 * std::cos(n_ * kPi * t);
}

Point2 FlowerCurve::eval(double t) const {
    return polar(radius(t), kPi * t);
}

Point2 FlowerCurve::derivative(double t) const {
    const double r = radius(t);
    const double dr = -0.2 * n_ * kPi * std::sin(n_ * kPi * t);
    const double c = std::cos(kPi * t);
    const double s = std::sin(kPi * t);
    return {dr * c - r * kPi * s, dr * s + r * kPi * c};
}

std::string FlowerCurve::describe() const {
    return "flower(n=" + std::to_string(n_) + ")";
}

InvertedCurve::InvertedCurve(std::shared_ptr<const Curve> base, Point2 center)
    : base_(std::move(base)), center_(center) {}

Point2 InvertedCurve::eval(double t) const {
    return invert(base_->eval(t), center_);
}

Point2 InvertedCurve::derivative(double t) const {
    // w = c + d / |d|^2 with d = gamma - c.
    const Point2 d = base_->eval(t) - center_;
    const Point2 dd = base_->derivative(t);
    const double r2 = norm2(d);
    return dd / r2 - d * (2.0 * dot(d, dd) / (r2 * r2));
}

std::string InvertedCurve::describe() const {
    std::ostringstream os;
    os << "inverted(" << base_->describe() << ", c=(" << center_.x << "," << center_.y << "))";
    return os.str();
}

// ---------------------------------------------------------------------------
// Pieces

Point2 piece_point(const BoundaryPiece& piece, double s) {
    return std::visit(
        overloaded{
            [&](const Segment& seg) { return seg.p + (seg.q - seg.p) * s; },
            [&](const CircularArc& a) {
                return a.center + polar(a.radius, a.start_angle + s * a.sweep);
            },
            [&](const ParametricArc& p) { return p.curve->eval(p.t0 + s * (p.t1 - p.t0)); },
        },
        piece);
}

Point2 piece_derivative(const BoundaryPiece& piece, double s) {
    return std::visit(
        overloaded{
            [&](const Segment& seg) { return seg.q - seg.p; },
            [&](const CircularArc& a) {
                const double ang = a.start_angle + s * a.sweep;
                return Point2{-std::sin(ang), std::cos(ang)} * (a.radius * a.sweep);
            },
            [&](const ParametricArc& p) {
                return p.curve->derivative(p.t0 + s * (p.t1 - p.t0)) * (p.t1 - p.t0);
            },
        },
        piece);
}

bool is_straight(const BoundaryPiece& piece) {
    return std::holds_alternative<Segment>(piece);
}

double piece_length(const BoundaryPiece& piece) {
    if (const auto* seg = std::get_if<Segment>(&piece)) return distance(seg->p, seg->q);
    if (const auto* arc = std::get_if<CircularArc>(&piece)) return arc->radius * std::abs(arc->sweep);
    const auto& g = gauss_legendre(12);
    constexpr int panels = 32;
    double len = 0.0;
    for (int k = 0; k < panels; ++k) {
        for (std::size_t i = 0; i < g.nodes.size(); ++i) {
            const double s = (k + g.nodes[i]) / panels;
            len += g.weights[i] / panels * norm(piece_derivative(piece, s));
        }
    }
    return len;
}

BoundaryPiece reversed(const BoundaryPiece& piece) {
    return std::visit(
        overloaded{
            [](const Segment& s) -> BoundaryPiece { return Segment{s.q, s.p}; },
            [](const CircularArc& a) -> BoundaryPiece {
                return CircularArc{a.center, a.radius, a.start_angle + a.sweep, -a.sweep};
            },
            [](const ParametricArc& p) -> BoundaryPiece {
                return ParametricArc{p.curve, p.t1, p.t0};
            },
        },
        piece);
}

void validate_piece(const BoundaryPiece& piece) {
    std::visit(overloaded{
                   [](const Segment& s) {
                       if (!(distance(s.p, s.q) > 0.0)) {
                           throw Error(ErrorCode::InvalidGeometry, "degenerate segment");
                       }
                   },
                   [](const CircularArc& a) {
                       if (!(a.radius > 0.0) || a.sweep == 0.0 || std::abs(a.sweep) > kTwoPi + 1e-12) {
                           throw Error(ErrorCode::InvalidGeometry, "invalid circular arc");
                       }
                   },
                   [](const ParametricArc& p) {
                       if (!p.curve || p.t0 == p.t1) {
                           throw Error(ErrorCode::InvalidGeometry, "empty parametric arc");
                       }
                   },
               },
               piece);
}

std::string describe(const BoundaryPiece& piece) {
    std::ostringstream os;
    os.precision(17);
    std::visit(overloaded{
                   [&](const Segment& s) {
                       os << "segment (" << s.p.x << "," << s.p.y << ")-(" << s.q.x << "," << s.q.y << ")";
                   },
                   [&](const CircularArc& a) {
                       os << "arc c=(" << a.center.x << "," << a.center.y << ") r=" << a.radius
                          << " start=" << a.start_angle << " sweep=" << a.sweep;
                   },
                   [&](const ParametricArc& p) {
                       os << p.curve->describe() << " t=[" << p.t0 << "," << p.t1 << "]";
                   },
               },
               piece);
    return os.str();
}

// ---------------------------------------------------------------------------
// Quadrilaterals

double signed_area(const QuadrilateralSpec& quad) {
    const auto& g = gauss_legendre(10);
    double area = 0.0;
    for (const auto& piece : quad.pieces) {
        const int panels = is_straight(piece) ? 1 : 32;
        for (int k = 0; k < panels; ++k) {
            for (std::size_t i = 0; i < g.nodes.size(); ++i) {
                const double s = (k + g.nodes[i]) / panels;
                const Point2 z = piece_point(piece, s);
                const Point2 dz = piece_derivative(piece, s);
                area += 0.5 * g.weights[i] / panels * cross(z, dz);
            }
        }
    }
    return area;
}

double scale(const QuadrilateralSpec& quad) {
    return bbox_diagonal(sample_boundary(quad, 32));
}

Point2 corner_centroid(const QuadrilateralSpec& quad) {
    Point2 c;
    for (const auto& z : quad.corners) c += z;
    return c / 4.0;
}

QuadrilateralSpec make_quadrilateral(std::vector<BoundaryPiece> pieces,
                                     const std::array<Point2, 4>& corners) {
    if (pieces.size() < 2) {
        throw Error(ErrorCode::InvalidGeometry, "quadrilateral needs at least two pieces");
    }
    for (const auto& p : pieces) validate_piece(p);
    QuadrilateralSpec quad;
    quad.pieces = std::move(pieces);
    quad.corners = corners;
    const std::size_t n = quad.pieces.size();

    std::vector<Point2> pts;
    for (const auto& p : quad.pieces) pts.push_back(piece_start(p));
    const double sc = bbox_diagonal(sample_boundary(quad, 16));
    const double tol = 1e-12 * std::max(sc, 1e-300);

    for (std::size_t i = 0; i < n; ++i) {
        const Point2 e = piece_end(quad.pieces[i]);
        const Point2 s = piece_start(quad.pieces[(i + 1) % n]);
        if (distance(e, s) > std::max(tol, 1e-12)) {
            throw Error(ErrorCode::InvalidGeometry,
                        "boundary is not closed at piece " + std::to_string(i));
        }
    }
    for (int j = 0; j < 4; ++j) {
        int found = -1;
        for (std::size_t i = 0; i < n; ++i) {
            if (distance(pts[i], corners[j]) <= std::max(tol, 1e-12)) {
                found = int(i);
                break;
            }
        }
        if (found < 0) {
            throw Error(ErrorCode::InvalidGeometry,
                        "corner " + std::to_string(j + 1) + " is not at a piece junction");
        }
        quad.corner_piece[j] = found;
    }
    // Corners must appear in boundary order: walking from corner 0 we meet 1, 2, 3.
    std::array<int, 4> offset{};
    for (int j = 0; j < 4; ++j) {
        offset[j] = int((quad.corner_piece[j] - quad.corner_piece[0] + int(n)) % int(n));
    }
    for (int j = 1; j < 4; ++j) {
        if (offset[j] <= offset[j - 1]) {
            throw Error(ErrorCode::InvalidGeometry, "corners are not distinct or not in boundary order");
        }
    }
    quad.part_of_piece.assign(n, 0);
    for (int j = 0; j < 4; ++j) {
        const int begin = quad.corner_piece[j];
        const int end = quad.corner_piece[(j + 1) % 4];
        for (int i = begin; i != end; i = (i + 1) % int(n)) quad.part_of_piece[i] = j;
    }
    if (!(signed_area(quad) > 0.0)) {
        throw Error(ErrorCode::InvalidGeometry, "boundary is not positively oriented");
    }
    return quad;
}

QuadrilateralSpec polygon_quad(const std::array<Point2, 4>& v) {
    for (int i = 0; i < 4; ++i) {
        if (segments_cross(v[i], v[(i + 1) % 4], v[(i + 2) % 4], v[(i + 3) % 4])) {
            throw Error(ErrorCode::InvalidGeometry, "polygon is self-intersecting");
        }
    }
    std::vector<BoundaryPiece> pieces;
    for (int i = 0; i < 4; ++i) pieces.emplace_back(Segment{v[i], v[(i + 1) % 4]});
    return make_quadrilateral(std::move(pieces), v);
}

QuadrilateralSpec conjugate(const QuadrilateralSpec& quad) {
    const std::array<Point2, 4> c{quad.corners[1], quad.corners[2], quad.corners[3], quad.corners[0]};
    return make_quadrilateral(quad.pieces, c);
}

double interior_angle(const QuadrilateralSpec& quad, int j) {
    const int n = int(quad.pieces.size());
    const int next = quad.corner_piece[j];
    const int prev = (next - 1 + n) % n;
    const Point2 out = piece_derivative(quad.pieces[next], 0.0);
    const Point2 back = -piece_derivative(quad.pieces[prev], 1.0);
    double a = std::atan2(cross(out, back), dot(out, back));
    if (a <= 0.0) a += kTwoPi;
    return a;
}

double boundary_distance(const QuadrilateralSpec& quad, const Point2& z) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : quad.pieces) best = std::min(best, distance_to_piece(p, z));
    return best;
}

bool point_inside(const QuadrilateralSpec& quad, const Point2& z) {
    if (boundary_distance(quad, z) <= 1e-12 * scale(quad)) {
        throw Error(ErrorCode::OnBoundary, "point lies on the boundary");
    }
    double w = 0.0;
    for (const auto& p : quad.pieces) w += winding_of_piece(p, z);
    return std::lround(w / kTwoPi) == 1;
}

// ---------------------------------------------------------------------------
// Inversion

Circle circle_through(const Point2& p1, const Point2& p2, const Point2& p3) {
    const double sc = std::max({distance(p1, p2), distance(p2, p3), distance(p1, p3)});
    const double d = 2.0 * orient(p1, p2, p3);
    if (std::abs(d) <= 1e-14 * sc * sc) {
        throw Error(ErrorCode::Collinear, "circle_through: points are collinear");
    }
    // Circumcenter relative to p1.
    const Point2 b = p2 - p1;
    const Point2 c = p3 - p1;
    const double bb = norm2(b);
    const double cc = norm2(c);
    const Point2 u{(c.y * bb - b.y * cc) / d, (b.x * cc - c.x * bb) / d};
    return {p1 + u, norm(u)};
}

Point2 invert(const Point2& z, const Point2& c) {
    const Point2 d = z - c;
    const double r2 = norm2(d);
    if (r2 == 0.0) throw Error(ErrorCode::Pole, "invert: z equals the center");
    return c + d / r2;
}

namespace {

BoundaryPiece arc_through(const Point2& a, const Point2& m, const Point2& b) {
    const Circle circ = circle_through(a, m, b);
    const double a0 = std::atan2(a.y - circ.center.y, a.x - circ.center.x);
    const double am = std::atan2(m.y - circ.center.y, m.x - circ.center.x);
    const double a1 = std::atan2(b.y - circ.center.y, b.x - circ.center.x);
    const double ccw_end = wrap_positive(a1 - a0);
    const double ccw_mid = wrap_positive(am - a0);
    const double sweep = ccw_mid < ccw_end ? ccw_end : ccw_end - kTwoPi;
    return CircularArc{circ.center, circ.radius, a0, sweep};
}

}  // namespace

BoundaryPiece invert_piece(const BoundaryPiece& piece, const Point2& c) {
    const double tol = 1e-12 * std::max(1.0, piece_length(piece));
    if (distance_to_piece(piece, c) <= tol) {
        throw Error(ErrorCode::Pole, "invert_piece: center lies on the piece");
    }
    return std::visit(
        overloaded{
            [&](const Segment& s) -> BoundaryPiece {
                const Point2 a = invert(s.p, c);
                const Point2 b = invert(s.q, c);
                const double len = distance(s.p, s.q);
                const double off = std::abs(orient(s.p, s.q, c)) / len;
                if (off <= 1e-14 * std::max(len, distance(s.p, c))) return Segment{a, b};
                return arc_through(a, invert(0.5 * (s.p + s.q), c), b);
            },
            [&](const CircularArc& arc) -> BoundaryPiece {
                const Point2 a = invert(piece_start(piece), c);
                const Point2 b = invert(piece_end(piece), c);
                if (std::abs(distance(arc.center, c) - arc.radius) <= 1e-14 * arc.radius) {
                    return Segment{a, b};
                }
                return arc_through(a, invert(piece_point(piece, 0.5), c), b);
            },
            [&](const ParametricArc& p) -> BoundaryPiece {
                return ParametricArc{std::make_shared<InvertedCurve>(p.curve, c), p.t0, p.t1};
            },
        },
        piece);
}

InversionResult invert_quadrilateral(const QuadrilateralSpec& quad, const Point2& c) {
    bool inside = false;
    try {
        inside = point_inside(quad, c);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::OnBoundary) throw;
    }
    if (!inside) {
        throw Error(ErrorCode::InvalidCenter, "inversion center must lie strictly inside the quadrilateral");
    }
    std::vector<BoundaryPiece> pieces;
    pieces.reserve(quad.pieces.size());
    for (const auto& p : quad.pieces) pieces.push_back(invert_piece(p, c));
    std::array<Point2, 4> corners{};
    for (int j = 0; j < 4; ++j) {
        // Take the corner from the inverted piece so junctions match exactly.
        corners[j] = piece_start(pieces[quad.corner_piece[j]]);
    }
    // Pin each junction to the start of the following piece.
    const std::size_t n = pieces.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (auto* s = std::get_if<Segment>(&pieces[i])) s->q = piece_start(pieces[(i + 1) % n]);
    }
    return {make_quadrilateral(std::move(pieces), corners), c};
}

// ---------------------------------------------------------------------------
// Domain families

QuadrilateralSpec rect_on_circle(double t) {
    if (!(t > 0.0 && t <= kPi / 2 + 1e-15)) {
        throw Error(ErrorCode::Domain, "rect_on_circle: t must lie in (0, pi/2]");
    }
    const Point2 e{std::cos(t), std::sin(t)};
    return polygon_quad({Point2{1.0, 0.0}, e, Point2{-1.0, 0.0}, -e});
}

double rect_on_circle_interior_modulus(double t) {
    if (!(t > 0.0 && t <= kPi / 2 + 1e-15)) {
        throw Error(ErrorCode::Domain, "rect_on_circle: t must lie in (0, pi/2]");
    }
    return std::tan(t / 2.0);
}

QuadrilateralSpec side_slide_quad(double h, double s, double t) {
    try {
        return polygon_quad({Point2{0.0, 0.0}, Point2{1.0, 0.0}, Point2{t, h}, Point2{t - s, h}});
    } catch (const Error& e) {
        throw Error(ErrorCode::InvalidGeometry, std::string("side_slide_quad: ") + e.what());
    }
}

QuadrilateralSpec flower_quad(int n) {
    if (n < 2 || n % 2 != 0) {
        throw Error(ErrorCode::UnsupportedParameter,
                    "flower_quad: n must be even so that the corners are radius extrema");
    }
    auto curve = std::make_shared<FlowerCurve>(n);
    const std::array<double, 5> knots{-1.0, -0.25, 0.0, 0.5, 1.0};
    std::vector<BoundaryPiece> pieces;
    for (int i = 0; i < 4; ++i) pieces.emplace_back(ParametricArc{curve, knots[i], knots[i + 1]});
    std::array<Point2, 4> corners{};
    for (int i = 0; i < 4; ++i) corners[i] = curve->eval(knots[i]);
    return make_quadrilateral(std::move(pieces), corners);
}

QuadrilateralSpec preset_quad(const std::string& name) {
    if (name == "A") {
        return polygon_quad({Point2{0, 0}, Point2{1, 0}, Point2{28.0 / 25, 69.0 / 50}, Point2{-19.0 / 25, 21.0 / 25}});
    }
    if (name == "B") {
        return polygon_quad({Point2{0, 0}, Point2{1, 0}, Point2{42.0 / 25, 4.0}, Point2{-3.0 / 25, 21.0 / 25}});
    }
    if (name == "C") return flower_quad(4);
    if (name == "D") return flower_quad(8);
    throw Error(ErrorCode::InvalidParameter, "unknown preset '" + name + "'");
}

}  // namespace hpmod
