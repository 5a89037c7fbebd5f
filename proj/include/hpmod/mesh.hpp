#pragma once

// Triangular meshes of quadrilateral domains: corner-isolating initial
// triangulation, geometric (alpha, nu) refinement towards the corners and
// layer-graded polynomial degree distributions.

#include "hpmod/geometry.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace hpmod {

enum class EdgeTag : std::uint8_t { Interior, Dirichlet0, Dirichlet1, Neumann };
const char* to_string(EdgeTag tag);

/// Boundary arc index used for the artificial outer circle of truncated
/// exterior meshes.
inline constexpr int kOuterPart = 4;

/// Boundary condition per boundary part 0..3 (quadrilateral arcs) and 4
/// (artificial outer circle).
using PartConditions = std::array<EdgeTag, 5>;

/// u = 0 on arc 0, u = 1 on arc 2, Neumann on arcs 1 and 3.
PartConditions interior_conditions();
/// The same with the corners shifted by one: u = 0 on arc 1, u = 1 on arc 3.
PartConditions conjugate_conditions();

/// Restriction of a boundary piece to [s_begin, s_end]; s_begin belongs to
/// the edge's first vertex.
struct CurvedEdge {
    BoundaryPiece piece;
    double s_begin = 0.0;
    double s_end = 1.0;

    Point2 point(double u) const { return piece_point(piece, s_begin + u * (s_end - s_begin)); }
    Point2 derivative(double u) const {
        return piece_derivative(piece, s_begin + u * (s_end - s_begin)) * (s_end - s_begin);
    }
};

/// Boundary edge oriented with the domain on its left.
struct BoundaryEdge {
    int v0 = -1;
    int v1 = -1;
    int part = 0;
    EdgeTag tag = EdgeTag::Neumann;
    std::optional<CurvedEdge> curve;
};

struct RefinementParams {
    double alpha = 0.15;
    int nu = 0;
};

struct Mesh {
    std::vector<Point2> vertices;
    /// Counterclockwise vertex triples.
    std::vector<std::array<int, 3>> triangles;
    /// -1 away from the corners, 0 for elements touching a corner, k > 0 for
    /// the k-th refinement layer counted outwards.
    std::vector<int> layer;
    std::vector<BoundaryEdge> boundary_edges;
    /// Vertex index of each quadrilateral corner.
    std::array<int, 4> corners{{-1, -1, -1, -1}};
    RefinementParams refinement{0.15, 0};
    double scale = 1.0;

    /// Index into boundary_edges of the edge {a, b}, or -1.
    int boundary_edge(int a, int b) const;
    EdgeTag tag(int a, int b) const;
    void rebuild_index();

private:
    std::map<std::pair<int, int>, int> index_;
};

struct MeshOptions {
    /// Upper bound on edge length relative to the domain scale.
    double h_max_factor = 0.25;
    double min_angle_deg = 20.0;
    /// Upper bound on chord sagitta relative to chord length.
    double sagitta_ratio = 0.06;
    /// Upper bound on the tangent turn along one boundary edge, radians.
    double max_turn = 0.5;
    int min_edges_per_part = 4;
    /// Upper bound on the length ratio of neighbouring boundary edges.
    double grading_ratio = 2.0;
    /// Corner-adjacent boundary edges relative to the maximum edge length.
    double corner_size_factor = 1.0;
    int max_points = 40000;
};

/// Conforming triangulation of the quadrilateral interior in which corner z
/// with opening angle theta touches exactly 1 (theta <= pi/2), 2 (theta <= pi)
/// or 3 triangles. Boundary tags follow interior_conditions().
Mesh initial_mesh(const QuadrilateralSpec& quad, const MeshOptions& opts = {});

struct TruncationOptions {
    double radius = 1.0e6;
    /// Nodes per circle in the structured far-field rings.
    int ring_nodes = 8;
    /// Upper bound on the radius ratio between consecutive rings.
    double ring_ratio = 2.5;
};

/// Mesh of the region between the quadrilateral and a circle of the given
/// radius centred at the corner centroid. Corner rules use the exterior
/// angles; the outer circle is arc kOuterPart.
Mesh truncated_exterior_mesh(const QuadrilateralSpec& quad, const TruncationOptions& trunc,
                             const MeshOptions& opts = {});

/// nu levels of geometric refinement of the corner elements with factor alpha.
Mesh refine(const Mesh& mesh, const RefinementParams& params);

/// Returns a copy with the boundary tags of each part replaced.
Mesh with_conditions(const Mesh& mesh, const PartConditions& conditions);

/// Number of triangles incident to vertex v.
int vertex_degree(const Mesh& mesh, int v);

/// Checks conformity, orientation and boundary tagging; throws Error{Meshing}.
void validate(const Mesh& mesh);

/// Plain-text dump: "v x y", "t a b c layer", "e a b part tag curved".
void write_mesh(std::ostream& os, const Mesh& mesh);

enum class DegreeKind { Constant, Graded };
const char* to_string(DegreeKind kind);

struct DegreeDistribution {
    std::vector<int> element_degree;
    int p_max = 1;
};

/// Constant: p_max everywhere. Graded: min(p_max, 1 + layer) inside corner
/// patches and p_max elsewhere.
DegreeDistribution assign_degrees(const Mesh& mesh, DegreeKind kind, int p_max);

}  // namespace hpmod
