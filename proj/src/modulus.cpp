#include "hpmod/modulus.hpp"

#include "hpmod/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>

namespace hpmod {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// One assembled discretisation shared by the solves of a computation.
struct Assembled {
    StiffnessSystem system;
    PhaseTimings timings;
};

Assembled assemble_mesh(const Mesh& initial, const SolveOptions& opts, double mesh_seconds) {
    auto t0 = Clock::now();
    Mesh mesh = refine(initial, {opts.alpha, opts.effective_nu()});
    Assembled out;
    out.timings.mesh = mesh_seconds + seconds_since(t0);
    auto degrees = assign_degrees(mesh, opts.degrees, opts.p_max);
    out.system = assemble(make_discretization(std::move(mesh), std::move(degrees)), opts.threads);
    out.timings.integrate = out.system.timings.integrate;
    out.timings.assemble = out.system.timings.assemble;
    return out;
}

// Solves the two plate assignments; the first gives the modulus.
struct PairSolution {
    Solution primary;
    Solution secondary;
};

PairSolution solve_pair(Assembled& a, const PartConditions& primary, const PartConditions& secondary) {
    PairSolution out{solve(a.system, primary), solve(a.system, secondary)};
    a.timings.solve = out.primary.solve_seconds + out.secondary.solve_seconds;
    return out;
}

ModulusResult make_result(const PairSolution& pair, const PhaseTimings& timings, Clock::time_point start) {
    ModulusResult r;
    r.modulus = pair.primary.energy;
    r.conjugate = pair.secondary.energy;
    r.reciprocal_error = std::abs(r.modulus * *r.conjugate - 1.0);
    r.unknowns = pair.primary.unknowns;
    r.timings = timings;
    r.timings.total = seconds_since(start);
    return r;
}

ModulusResult swapped(ModulusResult r) {
    std::swap(r.modulus, *r.conjugate);
    return r;
}

// Largest distance to the nearest corner over the outer circle, sampled.
Point2 farthest_outer_point(const QuadrilateralSpec& quad, double radius) {
    const Point2 c = corner_centroid(quad);
    const int samples = 3600;
    Point2 best = c + Point2{radius, 0.0};
    double best_d = -1.0;
    for (int i = 0; i < samples; ++i) {
        const Point2 z = c + polar(radius, 2.0 * std::numbers::pi * i / samples);
        double d = std::numeric_limits<double>::infinity();
        for (const auto& corner : quad.corners) d = std::min(d, distance(z, corner));
        if (d > best_d) {
            best_d = d;
            best = z;
        }
    }
    return best;
}

double diameter(const QuadrilateralSpec& quad) { return scale(quad); }

}  // namespace

int SolveOptions::effective_nu() const { return nu >= 0 ? nu : std::min(16, p_max); }

void SolveOptions::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidParameter, "alpha must lie in (0, 1)");
    if (p_max < 1 || p_max > kMaxDegree) {
        throw Error(ErrorCode::InvalidParameter, "p_max must lie in 1.." + std::to_string(kMaxDegree));
    }
    if (effective_nu() > 40) throw Error(ErrorCode::InvalidParameter, "nu must not exceed 40");
    if (!(radius > 0.0)) throw Error(ErrorCode::InvalidParameter, "radius must be positive");
}

PartConditions exterior_conditions() {
    return {EdgeTag::Neumann, EdgeTag::Dirichlet1, EdgeTag::Neumann, EdgeTag::Dirichlet0, EdgeTag::Neumann};
}

PartConditions exterior_conjugate_conditions() {
    return {EdgeTag::Dirichlet1, EdgeTag::Neumann, EdgeTag::Dirichlet0, EdgeTag::Neumann, EdgeTag::Neumann};
}

ModulusResult interior_modulus(const QuadrilateralSpec& quad, const SolveOptions& opts) {
    opts.validate();
    const auto start = Clock::now();
    Mesh initial = initial_mesh(quad, opts.mesh);
    auto a = assemble_mesh(initial, opts, seconds_since(start));
    const auto pair = solve_pair(a, interior_conditions(), conjugate_conditions());
    return make_result(pair, a.timings, start);
}

ModulusResult conjugate_modulus(const QuadrilateralSpec& quad, const SolveOptions& opts) {
    return swapped(interior_modulus(quad, opts));
}

double reciprocal_error(const QuadrilateralSpec& quad, const SolveOptions& opts) {
    return *interior_modulus(quad, opts).reciprocal_error;
}

ModulusResult exterior_modulus_inversion(const QuadrilateralSpec& quad, const SolveOptions& opts) {
    opts.validate();
    const auto start = Clock::now();
    const Point2 c = opts.center.value_or(corner_centroid(quad));
    const auto inv = invert_quadrilateral(quad, c);
    Mesh initial = initial_mesh(inv.image, opts.mesh);
    auto a = assemble_mesh(initial, opts, seconds_since(start));
    const auto pair = solve_pair(a, exterior_conditions(), exterior_conjugate_conditions());
    auto r = make_result(pair, a.timings, start);
    r.far_field = evaluate(pair.primary, inv.image_of_infinity);
    r.timings.total = seconds_since(start);
    return r;
}

ModulusResult exterior_modulus_truncated(const QuadrilateralSpec& quad, const SolveOptions& opts) {
    opts.validate();
    if (!(opts.radius > 10.0 * diameter(quad))) {
        throw Error(ErrorCode::InvalidParameter, "truncation radius must exceed ten domain diameters");
    }
    const auto start = Clock::now();
    TruncationOptions trunc;
    trunc.radius = opts.radius;
    Mesh initial = truncated_exterior_mesh(quad, trunc, opts.mesh);
    auto a = assemble_mesh(initial, opts, seconds_since(start));
    const auto pair = solve_pair(a, exterior_conditions(), exterior_conjugate_conditions());
    auto r = make_result(pair, a.timings, start);
    r.far_field = evaluate(pair.primary, farthest_outer_point(quad, opts.radius));
    r.timings.total = seconds_since(start);
    return r;
}

FlowerCapacities flower_capacity_invariance(int n, const SolveOptions& opts) {
    const auto quad = flower_quad(n);
    FlowerCapacities out;
    out.interior_result = conjugate_modulus(quad, opts);
    out.exterior_result = exterior_modulus_inversion(quad, opts);
    out.interior = out.interior_result.modulus;
    out.exterior = out.exterior_result.modulus;
    return out;
}

}  // namespace hpmod
