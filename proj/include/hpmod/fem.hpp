#pragma once

// Hierarchic high-order H1 finite elements on triangles: integrated-Legendre
// shape functions, blending maps for curved boundary edges, minimum-rule
// degree-of-freedom numbering, stiffness assembly and a direct sparse solve
// of the mixed Dirichlet-Neumann Laplace problem.

#include "hpmod/geometry.hpp"
#include "hpmod/mesh.hpp"

#include <Eigen/Sparse>

#include <array>
#include <memory>
#include <vector>

namespace hpmod {

inline constexpr int kMaxDegree = 20;

/// Shape functions of degree p on the reference triangle
/// {(xi, eta): xi, eta >= 0, xi + eta <= 1} with vertices (0,0), (1,0), (0,1).
/// Order: 3 vertex functions, then for local edges (0,1), (1,2), (2,0) the
/// edge functions of degree 2..p, then interior bubbles by increasing degree.
class ReferenceBasis {
public:
    enum class Kind { Vertex, Edge, Bubble };
    struct Function {
        Kind kind;
        int entity;  // vertex or edge index, -1 for bubbles
        int degree;  // polynomial degree of the function
        int i = 0;   // bubble indices
        int j = 0;
    };

    explicit ReferenceBasis(int p);

    int degree() const noexcept { return p_; }
    int size() const noexcept { return int(functions_.size()); }
    const std::vector<Function>& functions() const noexcept { return functions_; }

    /// Values and reference gradients of all functions at (xi, eta), with the
    /// edge functions in their local orientation (from vertex e to e+1).
    void eval(double xi, double eta, double* values, double* dxi, double* deta) const;

private:
    int p_;
    std::vector<Function> functions_;
};

/// Shared instance for degree p; throws Error{Domain} outside 1..kMaxDegree.
const ReferenceBasis& reference_basis(int p);

/// Map from the reference triangle onto a mesh element: affine for straight
/// elements, affine plus one blending term per curved boundary edge otherwise.
class ElementMap {
public:
    ElementMap(const Mesh& mesh, int element);

    bool curved() const noexcept { return curved_; }
    Point2 map(double xi, double eta) const;
    /// {dx/dxi, dx/deta, dy/dxi, dy/deta}.
    std::array<double, 4> jacobian(double xi, double eta) const;
    /// Reference coordinates of z; Newton iteration for curved elements.
    /// Throws Error{Evaluation} when the iteration does not converge.
    std::array<double, 2> inverse(const Point2& z) const;

private:
    struct CurvedSide {
        int a = 0;  // local start vertex
        int b = 1;  // local end vertex
        CurvedEdge curve;
        bool forward = true;  // curve parameter runs from a to b
    };

    std::array<Point2, 3> v_;
    std::vector<CurvedSide> sides_;
    bool curved_ = false;

    void eval(double xi, double eta, Point2& x, std::array<double, 4>* jac) const;
};

/// Global numbering of vertex, edge and interior modes under the minimum rule.
struct DofMap {
    struct Local {
        int basis_index;  // index into reference_basis(element degree)
        int global;
        double sign;
    };

    int num_vertices = 0;
    std::vector<std::array<int, 2>> edges;  // ascending vertex pairs
    std::vector<int> edge_degree;
    std::vector<int> edge_offset;
    std::vector<std::array<int, 3>> element_edges;
    std::vector<int> interior_offset;
    std::vector<int> element_degree;
    std::vector<std::array<int, 3>> element_vertices;
    int total = 0;

    std::vector<Local> element_dofs(int element) const;
};

DofMap build_dof_map(const Mesh& mesh, const DegreeDistribution& degrees);

/// Mesh, degrees and numbering bundled; immutable once built.
struct Discretization {
    Mesh mesh;
    DegreeDistribution degrees;
    DofMap dofs;
};

std::shared_ptr<const Discretization> make_discretization(Mesh mesh, DegreeDistribution degrees);

/// Local stiffness matrix of one element in DofMap::element_dofs order.
/// Throws Error{InvertedElement} for a non-positive Jacobian.
Eigen::MatrixXd element_stiffness(const Discretization& disc, int element);

struct AssemblyTimings {
    double integrate = 0.0;
    double assemble = 0.0;
};

struct StiffnessSystem {
    std::shared_ptr<const Discretization> disc;
    /// Full symmetric stiffness matrix over all modes.
    Eigen::SparseMatrix<double> matrix;
    AssemblyTimings timings;
};

/// Element integration is spread over `threads` workers (0 = hardware
/// concurrency); contributions are summed in element order, so the result does
/// not depend on the worker count.
StiffnessSystem assemble(std::shared_ptr<const Discretization> disc, int threads = 0);

struct Solution {
    std::shared_ptr<const Discretization> disc;
    Eigen::VectorXd coefficients;
    std::vector<char> fixed;  // 1 for Dirichlet modes
    int unknowns = 0;
    double residual = 0.0;
    /// u^T A u with the assembled matrix.
    double energy = 0.0;
    double solve_seconds = 0.0;
};

/// Solves with boundary tags taken from `conditions` by part; Dirichlet modes
/// are eliminated and the reduced system is factorised directly.
Solution solve(const StiffnessSystem& system, const PartConditions& conditions);
/// Solves with the tags stored in the discretisation's mesh.
Solution solve(const StiffnessSystem& system);

/// Element-wise quadrature of |grad u|^2.
double dirichlet_energy(const Solution& solution);

/// Value of the discrete solution at z. Throws Error{Location} when z is not in
/// any element.
double evaluate(const Solution& solution, const Point2& z);

/// Minimum and maximum of u over all element quadrature points.
std::array<double, 2> solution_range(const Solution& solution);

}  // namespace hpmod
