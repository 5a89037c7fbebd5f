#pragma once

// Conformal modulus computations: interior and conjugate moduli of a
// quadrilateral, and its exterior modulus either through inversion onto a
// bounded domain or on a truncated exterior domain.

#include "hpmod/fem.hpp"
#include "hpmod/geometry.hpp"
#include "hpmod/mesh.hpp"

#include <optional>

namespace hpmod {

struct SolveOptions {
    double alpha = 0.15;
    /// Refinement levels; negative selects min(16, p_max).
    int nu = -1;
    int p_max = 12;
    DegreeKind degrees = DegreeKind::Graded;
    /// Outer radius of truncated exterior domains.
    double radius = 1.0e6;
    /// Inversion centre; the corner centroid when empty.
    std::optional<Point2> center;
    MeshOptions mesh;
    /// Assembly workers, 0 for hardware concurrency.
    int threads = 0;

    int effective_nu() const;
    /// Throws Error{InvalidParameter} for out-of-range fields.
    void validate() const;
};

struct PhaseTimings {
    double mesh = 0.0;
    double integrate = 0.0;
    double assemble = 0.0;
    double solve = 0.0;
    double total = 0.0;
};

struct ModulusResult {
    double modulus = 0.0;
    std::optional<double> conjugate;
    /// |modulus * conjugate - 1|.
    std::optional<double> reciprocal_error;
    /// Potential at infinity, exterior computations only.
    std::optional<double> far_field;
    /// Free unknowns of the modulus solve.
    int unknowns = 0;
    PhaseTimings timings;
};

/// Plates on arcs 1 (u = 1) and 3 (u = 0); the exterior problem after
/// inversion or on a truncated domain.
PartConditions exterior_conditions();
/// Plates on arcs 2 (u = 0) and 0 (u = 1).
PartConditions exterior_conjugate_conditions();

/// Energy of the potential with u = 0 on arc 0 and u = 1 on arc 2. The
/// conjugate modulus is solved on the same assembly.
ModulusResult interior_modulus(const QuadrilateralSpec& quad, const SolveOptions& opts = {});
/// Modulus of (D; z2, z3, z4, z1); the conjugate field holds the interior modulus.
ModulusResult conjugate_modulus(const QuadrilateralSpec& quad, const SolveOptions& opts = {});
double reciprocal_error(const QuadrilateralSpec& quad, const SolveOptions& opts = {});

/// Exterior modulus via inversion about opts.center (default: corner
/// centroid); the far-field potential is the solution at the image of infinity.
ModulusResult exterior_modulus_inversion(const QuadrilateralSpec& quad, const SolveOptions& opts = {});
/// Exterior modulus on the region between the quadrilateral and a circle of
/// radius opts.radius with a homogeneous Neumann condition on the circle.
ModulusResult exterior_modulus_truncated(const QuadrilateralSpec& quad, const SolveOptions& opts = {});

struct FlowerCapacities {
    double interior = 0.0;
    double exterior = 0.0;
    ModulusResult interior_result;
    ModulusResult exterior_result;
};

/// Interior and exterior moduli of the n-petal flower quadrilateral with the
/// same plate assignment (arcs 1 and 3).
FlowerCapacities flower_capacity_invariance(int n, const SolveOptions& opts = {});

}  // namespace hpmod
