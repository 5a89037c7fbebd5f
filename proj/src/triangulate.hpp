#pragma once

// Constrained Delaunay triangulation with Ruppert-style refinement for planar
// straight-line graphs made of closed loops. Internal to the mesh module.

#include "hpmod/geometry.hpp"

#include <array>
#include <functional>
#include <vector>

namespace hpmod::detail {

struct PslgSegment {
    int a = -1;
    int b = -1;
    /// Caller-defined id of the input segment this piece descends from.
    int origin = -1;
    /// Position of a and b along the input segment, in [0, 1].
    double fa = 0.0;
    double fb = 1.0;
    bool splittable = true;
};

struct Pslg {
    std::vector<Point2> points;
    /// Closed loops; the region is the set of points with odd crossing parity.
    std::vector<PslgSegment> segments;
};

struct RefineControls {
    double min_angle_deg = 22.0;
    /// Target edge length at a point.
    std::function<double(const Point2&)> size;
    int max_points = 40000;
};

struct Triangulation {
    /// Input points keep their indices; Steiner points follow.
    std::vector<Point2> points;
    std::vector<std::array<int, 3>> triangles;
    std::vector<PslgSegment> segments;
};

/// Throws Error{Meshing} when a constraint cannot be recovered.
Triangulation triangulate(const Pslg& input, const RefineControls& controls);

}  // namespace hpmod::detail
