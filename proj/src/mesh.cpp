#include "hpmod/mesh.hpp"

#include "hpmod/error.hpp"
#include "triangulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <set>

namespace hpmod {

namespace {

constexpr double kPi = std::numbers::pi;

double ccw_angle(const Point2& from, const Point2& to) {
    double a = std::atan2(cross(from, to), dot(from, to));
    if (a <= 0.0) a += 2.0 * kPi;
    return a;
}

Point2 rotate(const Point2& v, double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

double segment_distance(const Point2& z, const Point2& a, const Point2& b) {
    const Point2 d = b - a;
    const double len2 = norm2(d);
    const double t = len2 > 0.0 ? std::clamp(dot(z - a, d) / len2, 0.0, 1.0) : 0.0;
    return distance(z, a + d * t);
}

// A vertex of a discretised boundary loop, located on piece `piece` at
// parameter s. Edge k of the loop runs from vertex k to vertex k + 1 along
// the piece of vertex k.
struct LoopVertex {
    Point2 p;
    int piece = 0;
    double s = 0.0;
    int corner = -1;
};

class BoundaryLoop {
public:
    BoundaryLoop(const QuadrilateralSpec& quad, const MeshOptions& opts, double h_max)
        : quad_(quad), opts_(opts), h_max_(h_max) {
        for (int i = 0; i < int(quad.pieces.size()); ++i) {
            std::vector<double> params{0.0};
            subdivide(i, 0.0, 1.0, 0, params);
            for (double s : params) verts_.push_back({piece_point(quad.pieces[i], s), i, s, -1});
        }
        for (int j = 0; j < 4; ++j) {
            for (auto& v : verts_) {
                if (v.piece == quad.corner_piece[j] && v.s == 0.0) v.corner = j;
            }
        }
        for (int round = 0; round < 200; ++round) {
            bool changed = false;
            changed |= enforce_max_length();
            changed |= enforce_part_counts();
            changed |= enforce_feature_size();
            changed |= enforce_grading();
            changed |= equalize_corners();
            changed |= enforce_corner_size();
            if (!changed) return;
        }
        throw Error(ErrorCode::Meshing, "boundary discretisation did not settle");
    }

    const std::vector<LoopVertex>& vertices() const { return verts_; }
    int size() const { return int(verts_.size()); }
    double end_param(int k) const {
        const auto& a = verts_[k];
        const auto& b = verts_[(k + 1) % size()];
        return b.piece == a.piece ? b.s : 1.0;
    }
    double edge_length(int k) const { return distance(verts_[k].p, verts_[(k + 1) % size()].p); }
    int part_of_edge(int k) const { return quad_.part_of_piece[verts_[k].piece]; }

private:
    const QuadrilateralSpec& quad_;
    const MeshOptions& opts_;
    double h_max_;
    std::vector<LoopVertex> verts_;
    std::vector<int> corner_prefix_;

    bool needs_split(const BoundaryPiece& piece, double s0, double s1) const {
        const Point2 a = piece_point(piece, s0);
        const Point2 b = piece_point(piece, s1);
        const double chord = distance(a, b);
        if (chord > h_max_) return true;
        if (is_straight(piece)) return false;
        const Point2 m = piece_point(piece, 0.5 * (s0 + s1));
        if (segment_distance(m, a, b) > opts_.sagitta_ratio * chord) return true;
        const Point2 ta = piece_derivative(piece, s0);
        const Point2 tb = piece_derivative(piece, s1);
        const double turn = std::abs(std::atan2(cross(ta, tb), dot(ta, tb)));
        return turn > opts_.max_turn;
    }

    void subdivide(int piece, double s0, double s1, int depth, std::vector<double>& out) const {
        if (depth < 40 && needs_split(quad_.pieces[piece], s0, s1)) {
            const double m = 0.5 * (s0 + s1);
            subdivide(piece, s0, m, depth + 1, out);
            out.push_back(m);
            subdivide(piece, m, s1, depth + 1, out);
        }
    }

    void split_edge_at(int k, double s) {
        const int piece = verts_[k].piece;
        LoopVertex v{piece_point(quad_.pieces[piece], s), piece, s, -1};
        verts_.insert(verts_.begin() + k + 1, v);
    }

    void split_edge(int k) { split_edge_at(k, 0.5 * (verts_[k].s + end_param(k))); }

    bool enforce_max_length() {
        bool changed = false;
        for (int k = 0; k < size(); ++k) {
            if (edge_length(k) > h_max_) {
                split_edge(k);
                changed = true;
                --k;
            }
        }
        return changed;
    }

    bool enforce_part_counts() {
        bool changed = false;
        for (int part = 0; part < 4; ++part) {
            for (;;) {
                int count = 0;
                int longest = -1;
                for (int k = 0; k < size(); ++k) {
                    if (part_of_edge(k) != part) continue;
                    ++count;
                    if (longest < 0 || edge_length(k) > edge_length(longest)) longest = k;
                }
                if (count >= opts_.min_edges_per_part) break;
                split_edge(longest);
                changed = true;
            }
        }
        return changed;
    }

    // Edges must be shorter than their distance to non-neighbouring edges.
    bool enforce_feature_size() {
        const int n = size();
        corner_prefix_.assign(n + 1, 0);
        for (int i = 0; i < n; ++i) corner_prefix_[i + 1] = corner_prefix_[i] + (verts_[i].corner >= 0 ? 1 : 0);
        std::vector<int> to_split;
        for (int k = 0; k < n; ++k) {
            const Point2 a = verts_[k].p;
            const Point2 b = verts_[(k + 1) % n].p;
            const Point2 mid = 0.5 * (a + b);
            const double len = distance(a, b);
            double lfs = std::numeric_limits<double>::infinity();
            for (int j = 0; j < n; ++j) {
                const int hop = std::min((j - k + n) % n, (k - j + n) % n);
                if (hop <= 2) continue;
                // Edges on the two arcs meeting at one corner form a wedge,
                // which the corner patch resolves.
                if (corners_between(k, j) == 1) continue;
                const double d = std::min({segment_distance(mid, verts_[j].p, verts_[(j + 1) % n].p),
                                           segment_distance(a, verts_[j].p, verts_[(j + 1) % n].p),
                                           segment_distance(b, verts_[j].p, verts_[(j + 1) % n].p)});
                lfs = std::min(lfs, d);
            }
            if (len > lfs) to_split.push_back(k);
        }
        for (auto it = to_split.rbegin(); it != to_split.rend(); ++it) split_edge(*it);
        return !to_split.empty();
    }

    // Corners met on the shorter loop path from edge k to edge j, using the
    // prefix counts in corner_prefix_.
    int corners_between(int k, int j) const {
        const int n = size();
        // Corners among vertices from+1 .. to (cyclic).
        auto count = [&](int from, int to) {
            const int total = corner_prefix_[n];
            const int lo = from + 1;
            if (to >= lo) return corner_prefix_[to + 1] - corner_prefix_[lo];
            return total - corner_prefix_[lo] + corner_prefix_[to + 1];
        };
        const int forward = (j - k + n) % n;
        return forward <= n - forward ? count(k, j) : count(j, k);
    }

    bool enforce_grading() {
        bool changed = false;
        for (int k = 0; k < size(); ++k) {
            const int n = size();
            const double here = edge_length(k);
            const double prev = edge_length((k - 1 + n) % n);
            const double next = edge_length((k + 1) % n);
            if (here > opts_.grading_ratio * std::min(prev, next)) {
                split_edge(k);
                changed = true;
                --k;
            }
        }
        return changed;
    }

    // Corner-adjacent edges get comparable lengths.
    bool equalize_corners() {
        bool changed = false;
        for (int k = 0; k < size(); ++k) {
            if (verts_[k].corner < 0) continue;
            const int n = size();
            const int prev = (k - 1 + n) % n;
            const double lp = edge_length(prev);
            const double ln = edge_length(k);
            const double target = std::min(lp, ln);
            if (ln > 1.5 * target) {
                split_edge_at(k, param_at_distance(k, verts_[k].s, end_param(k), target));
                changed = true;
            } else if (lp > 1.5 * target) {
                split_edge_at(prev, param_at_distance(k, end_param(prev), verts_[prev].s, target));
                changed = true;
                ++k;
            }
        }
        return changed;
    }

    // Corner-adjacent edges no longer than corner_size_factor * h_max.
    bool enforce_corner_size() {
        const double target = opts_.corner_size_factor * h_max_;
        bool changed = false;
        for (int k = 0; k < size(); ++k) {
            if (verts_[k].corner < 0) continue;
            if (edge_length(k) > 1.5 * target) {
                split_edge_at(k, param_at_distance(k, verts_[k].s, end_param(k), target));
                changed = true;
            }
            const int prev = (k - 1 + size()) % size();
            if (edge_length(prev) > 1.5 * target) {
                split_edge_at(prev, param_at_distance(k, end_param(prev), verts_[prev].s, target));
                changed = true;
                ++k;
            }
        }
        return changed;
    }

    // Parameter between s_near and s_far whose point lies at distance d from
    // vertex k; the edge's piece is the one containing both parameters.
    double param_at_distance(int k, double s_near, double s_far, double d) const {
        const int n = size();
        const Point2 v = verts_[k].p;
        // Edge before the corner lies on the previous vertex's piece.
        const int piece = (s_far < s_near) ? verts_[(k - 1 + n) % n].piece : verts_[k].piece;
        double lo = s_near, hi = s_far;
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (distance(piece_point(quad_.pieces[piece], mid), v) < d) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        return 0.5 * (lo + hi);
    }
};

struct PatchInfo {
    int corner_vertex = -1;
    std::vector<int> chain;  // q vertices ordered from the prev side to the next side
};

// Assembles a mesh from a traversal of the quadrilateral boundary (domain on
// the left), optionally with an extra ring loop for truncated exterior meshes.
struct MeshBuilder {
    const QuadrilateralSpec& quad;
    const MeshOptions& opts;
    bool exterior = false;

    // Structured far field, truncated exterior only.
    std::vector<Point2> ring0;

    Mesh build(const BoundaryLoop& loop, double h_region) const {
        const int n = loop.size();
        const auto& lv = loop.vertices();

        // Traversal order with the domain on the left.
        std::vector<int> order(n);
        for (int i = 0; i < n; ++i) order[i] = exterior ? (n - i) % n : i;
        auto trav_edge_length = [&](int i) { return distance(lv[order[i]].p, lv[order[(i + 1) % n]].p); };

        detail::Pslg pslg;
        std::vector<int> pslg_of_loop(n, -1);
        std::vector<double> local_size;
        for (int i = 0; i < n; ++i) {
            if (lv[i].corner >= 0) continue;
            pslg_of_loop[i] = int(pslg.points.size());
            pslg.points.push_back(lv[i].p);
        }

        // Corner patches.
        std::array<std::vector<Point2>, 4> chain_pts;
        std::array<int, 4> patch_count{};
        for (int i = 0; i < n; ++i) {
            const LoopVertex& v = lv[order[i]];
            if (v.corner < 0) continue;
            const Point2 a = lv[order[(i + 1) % n]].p;
            const Point2 b = lv[order[(i - 1 + n) % n]].p;
            double theta = interior_angle(quad, v.corner);
            if (exterior) theta = 2.0 * kPi - theta;
            const int count = theta <= kPi / 2 + 1e-9 ? 1 : (theta <= kPi + 1e-9 ? 2 : 3);
            const double phi = ccw_angle(a - v.p, b - v.p);
            if (count == 1 && phi >= kPi) {
                throw Error(ErrorCode::Meshing, "corner chord angle inconsistent with tangent angle");
            }
            const double d = std::min(distance(a, v.p), distance(b, v.p));
            const Point2 dir = (a - v.p) / distance(a, v.p);
            patch_count[v.corner] = count;
            for (int m = 1; m < count; ++m) chain_pts[v.corner].push_back(v.p + rotate(dir, phi * m / count) * d);
        }
        std::array<std::vector<int>, 4> chain_ids;
        for (int j = 0; j < 4; ++j) {
            for (const auto& q : chain_pts[j]) {
                chain_ids[j].push_back(int(pslg.points.size()));
                pslg.points.push_back(q);
            }
        }

        // Remaining loop: corners replaced by their chains (reverse order, from
        // the prev side towards the next side).
        std::vector<int> region_loop;            // pslg point ids
        std::vector<int> region_origin;          // loop edge id of the segment starting here, or -1
        for (int i = 0; i < n; ++i) {
            const LoopVertex& v = lv[order[i]];
            if (v.corner >= 0) {
                const auto& ids = chain_ids[v.corner];
                for (auto it = ids.rbegin(); it != ids.rend(); ++it) {
                    region_loop.push_back(*it);
                    region_origin.push_back(-1);
                }
                continue;
            }
            region_loop.push_back(pslg_of_loop[order[i]]);
            const bool next_is_corner = lv[order[(i + 1) % n]].corner >= 0;
            region_origin.push_back(next_is_corner ? -1 : i);
        }
        const int m = int(region_loop.size());
        for (int k = 0; k < m; ++k) {
            detail::PslgSegment seg;
            seg.a = region_loop[k];
            seg.b = region_loop[(k + 1) % m];
            seg.origin = region_origin[k];
            seg.splittable = region_origin[k] >= 0;
            pslg.segments.push_back(seg);
        }

        // Ring loop around the quadrilateral for truncated exterior meshes.
        std::vector<int> ring_ids;
        for (const auto& p : ring0) {
            ring_ids.push_back(int(pslg.points.size()));
            pslg.points.push_back(p);
        }
        for (int k = 0; k < int(ring_ids.size()); ++k) {
            detail::PslgSegment seg;
            seg.a = ring_ids[k];
            seg.b = ring_ids[(k + 1) % ring_ids.size()];
            seg.origin = -2;
            seg.splittable = false;
            pslg.segments.push_back(seg);
        }

        // Size field from the boundary spacing.
        std::vector<std::pair<Point2, double>> sources;
        for (int i = 0; i < n; ++i) {
            sources.push_back({lv[order[i]].p, 0.5 * (trav_edge_length(i) + trav_edge_length((i - 1 + n) % n))});
        }
        for (int j = 0; j < 4; ++j) {
            for (const auto& q : chain_pts[j]) {
                double d = std::numeric_limits<double>::infinity();
                for (const auto& v : lv) {
                    if (v.corner == j) d = distance(q, v.p);
                }
                sources.push_back({q, d});
            }
        }
        for (std::size_t k = 0; k < ring0.size(); ++k) {
            sources.push_back({ring0[k], distance(ring0[k], ring0[(k + 1) % ring0.size()])});
        }
        detail::RefineControls controls;
        controls.min_angle_deg = opts.min_angle_deg;
        controls.max_points = opts.max_points;
        controls.size = [sources, h_region](const Point2& x) {
            double h = h_region;
            for (const auto& [p, l] : sources) h = std::min(h, l + 0.6 * distance(x, p));
            return h;
        };

        const detail::Triangulation tri = detail::triangulate(pslg, controls);

        Mesh mesh;
        mesh.scale = scale(quad);
        mesh.vertices = tri.points;
        // Snap split points of boundary chords onto the curve.
        auto trav_param = [&](int i, double f) {
            const int k0 = order[i];
            const int k1 = order[(i + 1) % n];
            // Loop edge between loop vertices k0, k1 in traversal direction.
            if (!exterior) {
                const double s0 = lv[k0].s;
                const double s1 = loop.end_param(k0);
                return std::pair<int, double>{lv[k0].piece, s0 + f * (s1 - s0)};
            }
            const double s0 = loop.end_param(k1);
            const double s1 = lv[k1].s;
            return std::pair<int, double>{lv[k1].piece, s0 + f * (s1 - s0)};
        };
        for (const auto& seg : tri.segments) {
            if (seg.origin < 0) continue;
            for (auto [v, f] : {std::pair{seg.a, seg.fa}, std::pair{seg.b, seg.fb}}) {
                if (v < int(pslg.points.size())) continue;
                const auto [piece, s] = trav_param(seg.origin, f);
                mesh.vertices[v] = piece_point(quad.pieces[piece], s);
            }
        }

        for (const auto& t : tri.triangles) {
            mesh.triangles.push_back(t);
            mesh.layer.push_back(-1);
        }

        // Corner vertices and patch triangles.
        for (int i = 0; i < n; ++i) {
            const LoopVertex& v = lv[order[i]];
            if (v.corner < 0) continue;
            const int vid = int(mesh.vertices.size());
            mesh.vertices.push_back(v.p);
            mesh.corners[v.corner] = vid;
            const int a = pslg_of_loop[order[(i + 1) % n]];
            const int b = pslg_of_loop[order[(i - 1 + n) % n]];
            std::vector<int> fan{a};
            for (int id : chain_ids[v.corner]) fan.push_back(id);
            fan.push_back(b);
            for (std::size_t k = 0; k + 1 < fan.size(); ++k) {
                mesh.triangles.push_back({vid, fan[k], fan[k + 1]});
                mesh.layer.push_back(0);
            }
            if (int(fan.size()) - 1 != patch_count[v.corner]) {
                throw Error(ErrorCode::Meshing, "corner patch size mismatch");
            }
        }

        // Boundary edges along the quadrilateral.
        auto loop_vertex_id = [&](int k) {
            return lv[k].corner >= 0 ? mesh.corners[lv[k].corner] : pslg_of_loop[k];
        };
        auto make_edge = [&](int v0, int v1, int piece, double s0, double s1) {
            BoundaryEdge e;
            e.v0 = v0;
            e.v1 = v1;
            e.part = quad.part_of_piece[piece];
            if (!is_straight(quad.pieces[piece])) e.curve = CurvedEdge{quad.pieces[piece], s0, s1};
            mesh.boundary_edges.push_back(e);
        };
        for (const auto& seg : tri.segments) {
            if (seg.origin < 0) continue;
            const auto [piece, sa] = trav_param(seg.origin, seg.fa);
            const auto [piece_b, sb] = trav_param(seg.origin, seg.fb);
            (void)piece_b;
            make_edge(seg.a, seg.b, piece, sa, sb);
        }
        for (int i = 0; i < n; ++i) {
            const int k0 = order[i];
            const int k1 = order[(i + 1) % n];
            if (lv[k0].corner < 0 && lv[k1].corner < 0) continue;
            const auto [piece, s0] = trav_param(i, 0.0);
            const auto [piece1, s1] = trav_param(i, 1.0);
            (void)piece1;
            make_edge(loop_vertex_id(k0), loop_vertex_id(k1), piece, s0, s1);
        }
        return mesh;
    }
};

double max_radius(const QuadrilateralSpec& quad, const Point2& c) {
    double r = 0.0;
    for (const auto& piece : quad.pieces) {
        for (int i = 0; i <= 64; ++i) r = std::max(r, distance(piece_point(piece, i / 64.0), c));
    }
    return r;
}

void apply_default_tags(Mesh& mesh, bool exterior) {
    (void)exterior;
    const PartConditions cond = interior_conditions();
    for (auto& e : mesh.boundary_edges) e.tag = cond[e.part];
    mesh.rebuild_index();
}

void check_orientation(const Mesh& mesh) {
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& v = mesh.triangles[t];
        if (!(orient(mesh.vertices[v[0]], mesh.vertices[v[1]], mesh.vertices[v[2]]) > 0.0)) {
            throw Error(ErrorCode::Meshing, "triangle " + std::to_string(t) + " is not positively oriented");
        }
    }
}

template <class Build>
Mesh with_retries(Build&& build, MeshOptions opts) {
    std::string last;
    for (int attempt = 0; attempt < 4; ++attempt) {
        try {
            Mesh mesh = build(opts);
            check_orientation(mesh);
            return mesh;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::Meshing) throw;
            last = e.what();
        }
        opts.h_max_factor *= 0.6;
        opts.sagitta_ratio *= 0.5;
        opts.max_turn *= 0.6;
    }
    throw Error(ErrorCode::Meshing, "mesh generation failed: " + last);
}

bool sagitta_negligible(const CurvedEdge& c, const Point2& a, const Point2& b, double tol) {
    for (double u : {0.25, 0.5, 0.75}) {
        const Point2 lin = a + (b - a) * u;
        if (distance(c.point(u), lin) > tol) return false;
    }
    return true;
}

}  // namespace

const char* to_string(EdgeTag tag) {
    switch (tag) {
        case EdgeTag::Interior: return "interior";
        case EdgeTag::Dirichlet0: return "dirichlet0";
        case EdgeTag::Dirichlet1: return "dirichlet1";
        case EdgeTag::Neumann: return "neumann";
    }
    return "unknown";
}

const char* to_string(DegreeKind kind) {
    return kind == DegreeKind::Constant ? "constant" : "graded";
}

PartConditions interior_conditions() {
    return {EdgeTag::Dirichlet0, EdgeTag::Neumann, EdgeTag::Dirichlet1, EdgeTag::Neumann, EdgeTag::Neumann};
}

PartConditions conjugate_conditions() {
    return {EdgeTag::Neumann, EdgeTag::Dirichlet0, EdgeTag::Neumann, EdgeTag::Dirichlet1, EdgeTag::Neumann};
}

int Mesh::boundary_edge(int a, int b) const {
    auto it = index_.find({std::min(a, b), std::max(a, b)});
    return it == index_.end() ? -1 : it->second;
}

EdgeTag Mesh::tag(int a, int b) const {
    const int e = boundary_edge(a, b);
    return e < 0 ? EdgeTag::Interior : boundary_edges[e].tag;
}

void Mesh::rebuild_index() {
    index_.clear();
    for (int i = 0; i < int(boundary_edges.size()); ++i) {
        const auto& e = boundary_edges[i];
        index_[{std::min(e.v0, e.v1), std::max(e.v0, e.v1)}] = i;
    }
}

Mesh initial_mesh(const QuadrilateralSpec& quad, const MeshOptions& options) {
    return with_retries(
        [&](const MeshOptions& opts) {
            const double h_max = opts.h_max_factor * scale(quad);
            BoundaryLoop loop(quad, opts, h_max);
            MeshBuilder builder{quad, opts, false, {}};
            Mesh mesh = builder.build(loop, h_max);
            apply_default_tags(mesh, false);
            validate(mesh);
            return mesh;
        },
        options);
}

Mesh truncated_exterior_mesh(const QuadrilateralSpec& quad, const TruncationOptions& trunc,
                             const MeshOptions& options) {
    const Point2 c = corner_centroid(quad);
    const double r_quad = max_radius(quad, c);
    const double r0 = 2.0 * r_quad;
    if (!(trunc.radius > 10.0 * r0)) {
        throw Error(ErrorCode::InvalidParameter, "truncation radius must exceed ten domain diameters");
    }
    if (trunc.ring_nodes < 6 || !(trunc.ring_ratio > 1.0)) {
        throw Error(ErrorCode::InvalidParameter, "invalid far-field ring parameters");
    }
    const int m = trunc.ring_nodes;
    std::vector<Point2> ring0;
    for (int j = 0; j < m; ++j) ring0.push_back(c + polar(r0, 2.0 * kPi * j / m));

    Mesh mesh = with_retries(
        [&](const MeshOptions& opts) {
            const double h_max = opts.h_max_factor * scale(quad);
            BoundaryLoop loop(quad, opts, h_max);
            MeshBuilder builder{quad, opts, true, ring0};
            Mesh inner = builder.build(loop, 0.5 * distance(ring0[0], ring0[1]));
            apply_default_tags(inner, true);
            return inner;
        },
        options);

    // Locate the ring vertices in the inner mesh.
    std::vector<int> ring_id(m, -1);
    for (int v = 0; v < int(mesh.vertices.size()); ++v) {
        for (int j = 0; j < m; ++j) {
            if (mesh.vertices[v].x == ring0[j].x && mesh.vertices[v].y == ring0[j].y) ring_id[j] = v;
        }
    }
    for (int j = 0; j < m; ++j) {
        if (ring_id[j] < 0) throw Error(ErrorCode::Meshing, "ring vertex lost during triangulation");
    }

    const int levels = std::max(1, int(std::ceil(std::log(trunc.radius / r0) / std::log(trunc.ring_ratio))));
    const double q = std::pow(trunc.radius / r0, 1.0 / levels);
    std::vector<int> prev = ring_id;
    for (int l = 1; l <= levels; ++l) {
        const double r = l == levels ? trunc.radius : r0 * std::pow(q, l);
        std::vector<int> cur(m);
        for (int j = 0; j < m; ++j) {
            cur[j] = int(mesh.vertices.size());
            mesh.vertices.push_back(c + polar(r, 2.0 * kPi * j / m));
        }
        for (int j = 0; j < m; ++j) {
            const int a0 = prev[j], a1 = prev[(j + 1) % m];
            const int b0 = cur[j], b1 = cur[(j + 1) % m];
            if ((j + l) % 2 == 0) {
                mesh.triangles.push_back({a0, b0, b1});
                mesh.triangles.push_back({a0, b1, a1});
            } else {
                mesh.triangles.push_back({a0, b0, a1});
                mesh.triangles.push_back({b0, b1, a1});
            }
            mesh.layer.push_back(-1);
            mesh.layer.push_back(-1);
        }
        prev = cur;
    }
    for (int j = 0; j < m; ++j) {
        BoundaryEdge e;
        e.v0 = prev[j];
        e.v1 = prev[(j + 1) % m];
        e.part = kOuterPart;
        e.tag = EdgeTag::Neumann;
        e.curve = CurvedEdge{CircularArc{c, trunc.radius, 2.0 * kPi * j / m, 2.0 * kPi / m}, 0.0, 1.0};
        mesh.boundary_edges.push_back(e);
    }
    mesh.rebuild_index();
    validate(mesh);
    return mesh;
}

Mesh refine(const Mesh& mesh, const RefinementParams& params) {
    if (!(params.alpha > 0.0 && params.alpha < 1.0)) {
        throw Error(ErrorCode::InvalidParameter, "refine: alpha must lie in (0, 1)");
    }
    if (params.nu < 0) throw Error(ErrorCode::InvalidParameter, "refine: nu must be non-negative");
    Mesh out = mesh;
    out.refinement = params;
    out.rebuild_index();
    std::set<int> corner_set(out.corners.begin(), out.corners.end());
    const double straight_tol = 1e-14 * out.scale;

    for (int level = 1; level <= params.nu; ++level) {
        std::map<std::pair<int, int>, int> split_cache;
        auto split = [&](int v, int x) {
            const auto key = std::make_pair(std::min(v, x), std::max(v, x));
            if (auto it = split_cache.find(key); it != split_cache.end()) return it->second;
            const int be = out.boundary_edge(v, x);
            Point2 p = out.vertices[v] + (out.vertices[x] - out.vertices[v]) * params.alpha;
            const int id = int(out.vertices.size());
            if (be >= 0) {
                BoundaryEdge e = out.boundary_edges[be];
                const bool forward = e.v0 == v;
                BoundaryEdge e1 = e, e2 = e;
                if (e.curve) {
                    const double sv = forward ? e.curve->s_begin : e.curve->s_end;
                    const double sx = forward ? e.curve->s_end : e.curve->s_begin;
                    const double sn = sv + params.alpha * (sx - sv);
                    p = piece_point(e.curve->piece, sn);
                    e1.curve->s_end = sn;
                    e2.curve->s_begin = sn;
                }
                e1.v1 = id;
                e2.v0 = id;
                for (BoundaryEdge* piece : {&e1, &e2}) {
                    if (piece->curve &&
                        sagitta_negligible(*piece->curve,
                                           piece == &e1 ? out.vertices[piece->v0] : p,
                                           piece == &e1 ? p : out.vertices[piece->v1], straight_tol)) {
                        piece->curve.reset();
                    }
                }
                out.boundary_edges[be] = e1;
                out.boundary_edges.push_back(e2);
            }
            out.vertices.push_back(p);
            split_cache[key] = id;
            return id;
        };

        const int nt = int(out.triangles.size());
        for (int t = 0; t < nt; ++t) {
            if (out.layer[t] != 0) continue;
            auto tri = out.triangles[t];
            int r = -1;
            for (int i = 0; i < 3; ++i) {
                if (corner_set.count(tri[i])) r = i;
            }
            if (r < 0) continue;
            const int v = tri[r], x = tri[(r + 1) % 3], y = tri[(r + 2) % 3];
            const int xs = split(v, x);
            const int ys = split(v, y);
            out.triangles[t] = {v, xs, ys};
            const int trap_layer = params.nu - level + 1;
            const Point2 P = out.vertices[xs], X = out.vertices[x], Y = out.vertices[y], Q = out.vertices[ys];
            if (distance(P, Y) <= distance(X, Q)) {
                out.triangles.push_back({xs, x, y});
                out.triangles.push_back({xs, y, ys});
            } else {
                out.triangles.push_back({xs, x, ys});
                out.triangles.push_back({x, y, ys});
            }
            out.layer.push_back(trap_layer);
            out.layer.push_back(trap_layer);
        }
        out.rebuild_index();
    }
    return out;
}

Mesh with_conditions(const Mesh& mesh, const PartConditions& conditions) {
    Mesh out = mesh;
    for (auto& e : out.boundary_edges) e.tag = conditions[e.part];
    out.rebuild_index();
    return out;
}

int vertex_degree(const Mesh& mesh, int v) {
    int count = 0;
    for (const auto& t : mesh.triangles) {
        if (t[0] == v || t[1] == v || t[2] == v) ++count;
    }
    return count;
}

void validate(const Mesh& mesh) {
    if (mesh.layer.size() != mesh.triangles.size()) {
        throw Error(ErrorCode::Meshing, "layer array size mismatch");
    }
    std::map<std::pair<int, int>, int> directed;
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& v = mesh.triangles[t];
        const double area = orient(mesh.vertices[v[0]], mesh.vertices[v[1]], mesh.vertices[v[2]]);
        if (!(area > 0.0)) {
            throw Error(ErrorCode::Meshing, "triangle " + std::to_string(t) + " is not positively oriented");
        }
        for (int i = 0; i < 3; ++i) {
            const auto key = std::make_pair(v[i], v[(i + 1) % 3]);
            if (directed.count(key)) throw Error(ErrorCode::Meshing, "non-conforming edge");
            directed[key] = int(t);
        }
    }
    std::size_t boundary_count = 0;
    for (const auto& [key, t] : directed) {
        if (directed.count({key.second, key.first})) continue;
        ++boundary_count;
        const int e = mesh.boundary_edge(key.first, key.second);
        if (e < 0) throw Error(ErrorCode::Meshing, "boundary edge without tag");
        const auto& be = mesh.boundary_edges[e];
        if (be.v0 != key.first || be.v1 != key.second) {
            throw Error(ErrorCode::Meshing, "boundary edge has the domain on its right");
        }
        if (be.tag == EdgeTag::Interior) throw Error(ErrorCode::Meshing, "boundary edge tagged interior");
    }
    if (boundary_count != mesh.boundary_edges.size()) {
        throw Error(ErrorCode::Meshing, "boundary edge list does not match the triangulation");
    }
}

void write_mesh(std::ostream& os, const Mesh& mesh) {
    os.precision(17);
    for (const auto& v : mesh.vertices) os << "v " << v.x << ' ' << v.y << '\n';
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& v = mesh.triangles[t];
        os << "t " << v[0] << ' ' << v[1] << ' ' << v[2] << ' ' << mesh.layer[t] << '\n';
    }
    for (const auto& e : mesh.boundary_edges) {
        os << "e " << e.v0 << ' ' << e.v1 << ' ' << e.part << ' ' << to_string(e.tag) << ' '
           << (e.curve ? 1 : 0) << '\n';
    }
    for (int j = 0; j < 4; ++j) os << "c " << j << ' ' << mesh.corners[j] << '\n';
}

DegreeDistribution assign_degrees(const Mesh& mesh, DegreeKind kind, int p_max) {
    if (p_max < 1) throw Error(ErrorCode::Domain, "assign_degrees: p_max must be at least 1");
    DegreeDistribution d;
    d.p_max = p_max;
    d.element_degree.resize(mesh.triangles.size(), p_max);
    if (kind == DegreeKind::Graded) {
        for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
            if (mesh.layer[t] >= 0) d.element_degree[t] = std::min(p_max, 1 + mesh.layer[t]);
        }
    }
    return d;
}

}  // namespace hpmod
