#include "hpmod/error.hpp"
#include "hpmod/fem.hpp"
#include "hpmod/quadrature.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#ifdef HPMOD_HAVE_CHOLMOD
#include <Eigen/CholmodSupport>
#endif

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <thread>

namespace hpmod {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Basis values and reference gradients tabulated at the points of a
// collapsed rule, one row per function.
struct BasisTable {
    const TriangleQuadrature* rule = nullptr;
    Eigen::MatrixXd values;
    Eigen::MatrixXd dxi;
    Eigen::MatrixXd deta;
};

const BasisTable& basis_table(int p, int n) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::unique_ptr<BasisTable>> cache;
    const auto& basis = reference_basis(p);
    const auto& rule = collapsed_triangle_rule(n);
    std::lock_guard lock(mutex);
    auto& slot = cache[{p, n}];
    if (slot) return *slot;
    auto table = std::make_unique<BasisTable>();
    const int nf = basis.size();
    const int nq = int(rule.weights.size());
    table->rule = &rule;
    table->values.resize(nf, nq);
    table->dxi.resize(nf, nq);
    table->deta.resize(nf, nq);
    std::vector<double> v(nf), dx(nf), dy(nf);
    for (int q = 0; q < nq; ++q) {
        basis.eval(rule.xi[q], rule.eta[q], v.data(), dx.data(), dy.data());
        for (int f = 0; f < nf; ++f) {
            table->values(f, q) = v[f];
            table->dxi(f, q) = dx[f];
            table->deta(f, q) = dy[f];
        }
    }
    slot = std::move(table);
    return *slot;
}

// Reference stiffness blocks for affine elements.
struct ReferenceStiffness {
    Eigen::MatrixXd sxx;
    Eigen::MatrixXd sxy;  // Sxy + Syx
    Eigen::MatrixXd syy;
};

const ReferenceStiffness& reference_stiffness(int p) {
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<ReferenceStiffness>> cache;
    const auto& table = basis_table(p, p + 2);
    std::lock_guard lock(mutex);
    auto& slot = cache[p];
    if (slot) return *slot;
    const auto w = Eigen::Map<const Eigen::VectorXd>(table.rule->weights.data(), Eigen::Index(table.rule->weights.size()));
    auto s = std::make_unique<ReferenceStiffness>();
    s->sxx = table.dxi * w.asDiagonal() * table.dxi.transpose();
    const Eigen::MatrixXd cxy = table.dxi * w.asDiagonal() * table.deta.transpose();
    s->sxy = cxy + cxy.transpose();
    s->syy = table.deta * w.asDiagonal() * table.deta.transpose();
    slot = std::move(s);
    return *slot;
}

int quadrature_order(int p, bool curved) { return curved ? p + 4 : p + 2; }

std::array<int, 2> edge_key(int a, int b) { return a < b ? std::array<int, 2>{a, b} : std::array<int, 2>{b, a}; }

int find_edge(const DofMap& dofs, int a, int b) {
    const auto key = edge_key(a, b);
    const auto it = std::lower_bound(dofs.edges.begin(), dofs.edges.end(), key);
    if (it == dofs.edges.end() || *it != key) throw Error(ErrorCode::Assembly, "edge missing from dof map");
    return int(it - dofs.edges.begin());
}

// Physical gradients of the element-local functions at each quadrature point,
// with the area element folded into the weights.
struct ElementGeometry {
    Eigen::MatrixXd gx;  // local function x quadrature point
    Eigen::MatrixXd gy;
    Eigen::VectorXd weights;
};

ElementGeometry element_geometry(const Discretization& disc, int element, const std::vector<DofMap::Local>& local,
                                 int order) {
    const int p = disc.dofs.element_degree[element];
    const auto& table = basis_table(p, order);
    const ElementMap map(disc.mesh, element);
    const int nq = int(table.rule->weights.size());
    const int nl = int(local.size());
    ElementGeometry g;
    g.gx.resize(nl, nq);
    g.gy.resize(nl, nq);
    g.weights.resize(nq);
    for (int q = 0; q < nq; ++q) {
        const auto j = map.jacobian(table.rule->xi[q], table.rule->eta[q]);
        const double det = j[0] * j[3] - j[1] * j[2];
        if (!(det > 0.0)) {
            throw Error(ErrorCode::InvertedElement,
                        "non-positive Jacobian in element " + std::to_string(element));
        }
        // Inverse-transpose applied to reference gradients.
        const double a = j[3] / det, b = -j[2] / det, c = -j[1] / det, d = j[0] / det;
        for (int m = 0; m < nl; ++m) {
            const int f = local[m].basis_index;
            const double rx = table.dxi(f, q) * local[m].sign;
            const double ry = table.deta(f, q) * local[m].sign;
            g.gx(m, q) = a * rx + b * ry;
            g.gy(m, q) = c * rx + d * ry;
        }
        g.weights[q] = table.rule->weights[q] * det;
    }
    return g;
}

Eigen::MatrixXd curved_stiffness(const Discretization& disc, int element, const std::vector<DofMap::Local>& local) {
    const int p = disc.dofs.element_degree[element];
    const auto g = element_geometry(disc, element, local, quadrature_order(p, true));
    return g.gx * g.weights.asDiagonal() * g.gx.transpose() + g.gy * g.weights.asDiagonal() * g.gy.transpose();
}

Eigen::MatrixXd straight_stiffness(const Discretization& disc, int element, const std::vector<DofMap::Local>& local) {
    const auto& tri = disc.mesh.triangles[element];
    const Point2 e1 = disc.mesh.vertices[tri[1]] - disc.mesh.vertices[tri[0]];
    const Point2 e2 = disc.mesh.vertices[tri[2]] - disc.mesh.vertices[tri[0]];
    const double det = cross(e1, e2);
    const double scale = std::max(norm2(e1), norm2(e2));
    if (std::abs(det) <= 1e-14 * scale) {
        throw Error(ErrorCode::Assembly, "degenerate element " + std::to_string(element));
    }
    if (det < 0.0) throw Error(ErrorCode::InvertedElement, "inverted element " + std::to_string(element));
    const double g11 = norm2(e2) / det;
    const double g12 = -dot(e1, e2) / det;
    const double g22 = norm2(e1) / det;
    const auto& ref = reference_stiffness(disc.dofs.element_degree[element]);
    const int nl = int(local.size());
    Eigen::MatrixXd k(nl, nl);
    for (int n = 0; n < nl; ++n) {
        const int fn = local[n].basis_index;
        for (int m = 0; m < nl; ++m) {
            const int fm = local[m].basis_index;
            k(m, n) = (g11 * ref.sxx(fm, fn) + g12 * ref.sxy(fm, fn) + g22 * ref.syy(fm, fn)) * local[m].sign *
                      local[n].sign;
        }
    }
    return k;
}

}  // namespace

std::vector<DofMap::Local> DofMap::element_dofs(int element) const {
    const DofMap& dofs = *this;
    const int p = dofs.element_degree[element];
    const auto& tri = dofs.element_vertices[element];
    std::vector<DofMap::Local> out;
    out.reserve((p + 1) * (p + 2) / 2);
    for (int v = 0; v < 3; ++v) out.push_back({v, tri[v], 1.0});
    for (int le = 0; le < 3; ++le) {
        const int ge = dofs.element_edges[element][le];
        const int pe = dofs.edge_degree[ge];
        const bool flipped = tri[le] > tri[(le + 1) % 3];
        for (int k = 2; k <= pe; ++k) {
            const double sign = (flipped && (k % 2 == 1)) ? -1.0 : 1.0;
            out.push_back({3 + le * (p - 1) + (k - 2), dofs.edge_offset[ge] + (k - 2), sign});
        }
    }
    int running = 0;
    for (int d = 3; d <= p; ++d) {
        for (int i = 2; i <= d - 1; ++i, ++running) {
            out.push_back({3 + 3 * (p - 1) + running, dofs.interior_offset[element] + running, 1.0});
        }
    }
    return out;
}

DofMap build_dof_map(const Mesh& mesh, const DegreeDistribution& degrees) {
    const int nt = int(mesh.triangles.size());
    if (int(degrees.element_degree.size()) != nt) {
        throw Error(ErrorCode::InvalidParameter, "degree distribution does not match the mesh");
    }
    DofMap dofs;
    dofs.num_vertices = int(mesh.vertices.size());
    dofs.element_degree = degrees.element_degree;
    dofs.element_vertices = mesh.triangles;
    for (int p : dofs.element_degree) {
        if (p < 1 || p > kMaxDegree) {
            throw Error(ErrorCode::Domain, "element degree must lie in 1.." + std::to_string(kMaxDegree));
        }
    }
    for (const auto& tri : mesh.triangles) {
        for (int le = 0; le < 3; ++le) dofs.edges.push_back(edge_key(tri[le], tri[(le + 1) % 3]));
    }
    std::sort(dofs.edges.begin(), dofs.edges.end());
    dofs.edges.erase(std::unique(dofs.edges.begin(), dofs.edges.end()), dofs.edges.end());

    dofs.edge_degree.assign(dofs.edges.size(), std::numeric_limits<int>::max());
    dofs.element_edges.resize(nt);
    for (int t = 0; t < nt; ++t) {
        const auto& tri = mesh.triangles[t];
        for (int le = 0; le < 3; ++le) {
            const int ge = find_edge(dofs, tri[le], tri[(le + 1) % 3]);
            dofs.element_edges[t][le] = ge;
            dofs.edge_degree[ge] = std::min(dofs.edge_degree[ge], dofs.element_degree[t]);
        }
    }
    int next = dofs.num_vertices;
    dofs.edge_offset.resize(dofs.edges.size());
    for (std::size_t e = 0; e < dofs.edges.size(); ++e) {
        dofs.edge_offset[e] = next;
        next += dofs.edge_degree[e] - 1;
    }
    dofs.interior_offset.resize(nt);
    for (int t = 0; t < nt; ++t) {
        const int p = dofs.element_degree[t];
        dofs.interior_offset[t] = next;
        next += (p - 1) * (p - 2) / 2;
    }
    dofs.total = next;
    return dofs;
}

std::shared_ptr<const Discretization> make_discretization(Mesh mesh, DegreeDistribution degrees) {
    auto disc = std::make_shared<Discretization>();
    disc->dofs = build_dof_map(mesh, degrees);
    disc->mesh = std::move(mesh);
    disc->degrees = std::move(degrees);
    return disc;
}

Eigen::MatrixXd element_stiffness(const Discretization& disc, int element) {
    const auto local = disc.dofs.element_dofs(element);
    const ElementMap map(disc.mesh, element);
    return map.curved() ? curved_stiffness(disc, element, local) : straight_stiffness(disc, element, local);
}

StiffnessSystem assemble(std::shared_ptr<const Discretization> disc, int threads) {
    if (!disc) throw Error(ErrorCode::InvalidParameter, "assemble: null discretization");
    StiffnessSystem sys;
    sys.disc = disc;
    const int nt = int(disc->mesh.triangles.size());
    if (threads <= 0) threads = int(std::max(1u, std::thread::hardware_concurrency()));
    threads = std::min(threads, std::max(1, nt));

    auto t0 = Clock::now();
    std::vector<Eigen::MatrixXd> local(nt);
    std::vector<std::exception_ptr> failures(threads);
    auto work = [&](int w) {
        try {
            for (int t = w; t < nt; t += threads) local[t] = element_stiffness(*disc, t);
        } catch (...) {
            failures[w] = std::current_exception();
        }
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < threads; ++w) pool.emplace_back(work, w);
        for (auto& th : pool) th.join();
    }
    for (auto& f : failures) {
        if (f) std::rethrow_exception(f);
    }
    sys.timings.integrate = seconds_since(t0);

    t0 = Clock::now();
    std::size_t count = 0;
    for (const auto& k : local) count += std::size_t(k.size());
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(count);
    for (int t = 0; t < nt; ++t) {
        const auto dofs = disc->dofs.element_dofs(t);
        const int nl = int(dofs.size());
        for (int n = 0; n < nl; ++n) {
            for (int m = 0; m < nl; ++m) triplets.emplace_back(dofs[m].global, dofs[n].global, local[t](m, n));
        }
        local[t] = Eigen::MatrixXd();
    }
    sys.matrix.resize(disc->dofs.total, disc->dofs.total);
    sys.matrix.setFromTriplets(triplets.begin(), triplets.end());
    sys.matrix.makeCompressed();
    sys.timings.assemble = seconds_since(t0);
    return sys;
}

namespace {

Solution solve_with(const StiffnessSystem& system, const std::vector<EdgeTag>& edge_tags) {
    const auto& disc = *system.disc;
    const auto& mesh = disc.mesh;
    const int total = disc.dofs.total;
    Solution sol;
    sol.disc = system.disc;
    sol.coefficients = Eigen::VectorXd::Zero(total);
    sol.fixed.assign(total, 0);

    std::vector<signed char> vertex_value(disc.dofs.num_vertices, -1);
    for (std::size_t i = 0; i < mesh.boundary_edges.size(); ++i) {
        const auto& e = mesh.boundary_edges[i];
        const EdgeTag tag = edge_tags[i];
        if (tag != EdgeTag::Dirichlet0 && tag != EdgeTag::Dirichlet1) continue;
        const signed char value = tag == EdgeTag::Dirichlet1 ? 1 : 0;
        for (int v : {e.v0, e.v1}) {
            if (vertex_value[v] >= 0 && vertex_value[v] != value) {
                throw Error(ErrorCode::InvalidParameter, "vertex shared by Dirichlet arcs with different values");
            }
            vertex_value[v] = value;
        }
        const int ge = find_edge(disc.dofs, e.v0, e.v1);
        for (int k = 0; k < disc.dofs.edge_degree[ge] - 1; ++k) sol.fixed[disc.dofs.edge_offset[ge] + k] = 1;
    }
    for (int v = 0; v < disc.dofs.num_vertices; ++v) {
        if (vertex_value[v] >= 0) {
            sol.fixed[v] = 1;
            sol.coefficients[v] = vertex_value[v];
        }
    }

    std::vector<int> free_index(total, -1);
    int nf = 0;
    for (int i = 0; i < total; ++i) {
        if (!sol.fixed[i]) free_index[i] = nf++;
    }
    sol.unknowns = nf;

    const auto t0 = Clock::now();
    if (nf == 0) {
        sol.energy = sol.coefficients.dot(system.matrix * sol.coefficients);
        return sol;
    }
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nf);
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(std::size_t(system.matrix.nonZeros()));
    for (int c = 0; c < system.matrix.outerSize(); ++c) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(system.matrix, c); it; ++it) {
            const int r = int(it.row());
            if (free_index[r] < 0) continue;
            if (free_index[c] >= 0) {
                triplets.emplace_back(free_index[r], free_index[c], it.value());
            } else if (sol.coefficients[c] != 0.0) {
                rhs[free_index[r]] -= it.value() * sol.coefficients[c];
            }
        }
    }
    Eigen::SparseMatrix<double> a(nf, nf);
    a.setFromTriplets(triplets.begin(), triplets.end());
    triplets = {};

    Eigen::VectorXd scale(nf);
    for (int i = 0; i < nf; ++i) {
        const double d = a.coeff(i, i);
        if (!(d > 0.0)) throw Error(ErrorCode::Solver, "non-positive diagonal in the reduced system");
        scale[i] = 1.0 / std::sqrt(d);
    }
    Eigen::SparseMatrix<double> as = scale.asDiagonal() * a * scale.asDiagonal();
    as.makeCompressed();
    const Eigen::VectorXd bs = scale.asDiagonal() * rhs;

#ifdef HPMOD_HAVE_CHOLMOD
    Eigen::CholmodSupernodalLLT<Eigen::SparseMatrix<double>, Eigen::Lower> solver;
#else
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower> solver;
#endif
    solver.compute(as);
    if (solver.info() != Eigen::Success) throw Error(ErrorCode::Solver, "factorization failed");
    Eigen::VectorXd y = solver.solve(bs);
    if (solver.info() != Eigen::Success) throw Error(ErrorCode::Solver, "triangular solve failed");

    const double bnorm = bs.norm();
    double res = bnorm > 0.0 ? (bs - as * y).norm() / bnorm : 0.0;
    for (int it = 0; it < 4 && res > 1e-14; ++it) {
        const Eigen::VectorXd r = bs - as * y;
        const Eigen::VectorXd dy = solver.solve(r);
        const Eigen::VectorXd candidate = y + dy;
        const double next = (bs - as * candidate).norm() / bnorm;
        if (!(next < res)) break;
        y = candidate;
        res = next;
    }
    const Eigen::VectorXd x = scale.asDiagonal() * y;
    const double rnorm = rhs.norm();
    sol.residual = rnorm > 0.0 ? (rhs - a * x).norm() / rnorm : 0.0;
    for (int i = 0; i < total; ++i) {
        if (free_index[i] >= 0) sol.coefficients[i] = x[free_index[i]];
    }
    sol.solve_seconds = seconds_since(t0);
    sol.energy = sol.coefficients.dot(system.matrix * sol.coefficients);
    return sol;
}

}  // namespace

Solution solve(const StiffnessSystem& system, const PartConditions& conditions) {
    const auto& edges = system.disc->mesh.boundary_edges;
    std::vector<EdgeTag> tags(edges.size());
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const int part = edges[i].part;
        if (part < 0 || part >= int(conditions.size())) {
            throw Error(ErrorCode::InvalidParameter, "boundary edge with unknown part");
        }
        tags[i] = conditions[part];
    }
    return solve_with(system, tags);
}

Solution solve(const StiffnessSystem& system) {
    const auto& edges = system.disc->mesh.boundary_edges;
    std::vector<EdgeTag> tags(edges.size());
    for (std::size_t i = 0; i < edges.size(); ++i) tags[i] = edges[i].tag;
    return solve_with(system, tags);
}

namespace {

template <class F>
void for_each_quadrature_value(const Solution& solution, F&& visit) {
    const auto& disc = *solution.disc;
    for (int t = 0; t < int(disc.mesh.triangles.size()); ++t) {
        const auto local = disc.dofs.element_dofs(t);
        const ElementMap map(disc.mesh, t);
        const int p = disc.dofs.element_degree[t];
        const int order = quadrature_order(p, map.curved());
        const auto g = element_geometry(disc, t, local, order);
        const auto& table = basis_table(p, order);
        Eigen::VectorXd c(local.size());
        for (std::size_t m = 0; m < local.size(); ++m) c[m] = solution.coefficients[local[m].global];
        const Eigen::VectorXd ux = g.gx.transpose() * c;
        const Eigen::VectorXd uy = g.gy.transpose() * c;
        for (int q = 0; q < int(g.weights.size()); ++q) {
            double u = 0.0;
            for (std::size_t m = 0; m < local.size(); ++m) {
                u += c[m] * local[m].sign * table.values(local[m].basis_index, q);
            }
            visit(u, ux[q], uy[q], g.weights[q]);
        }
    }
}

}  // namespace

double dirichlet_energy(const Solution& solution) {
    double sum = 0.0;
    for_each_quadrature_value(solution, [&](double, double ux, double uy, double w) { sum += (ux * ux + uy * uy) * w; });
    return sum;
}

std::array<double, 2> solution_range(const Solution& solution) {
    std::array<double, 2> range{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for_each_quadrature_value(solution, [&](double u, double, double, double) {
        range[0] = std::min(range[0], u);
        range[1] = std::max(range[1], u);
    });
    return range;
}

double evaluate(const Solution& solution, const Point2& z) {
    const auto& disc = *solution.disc;
    const auto& mesh = disc.mesh;
    int best = -1;
    std::array<double, 2> best_ref{};
    double best_violation = std::numeric_limits<double>::infinity();
    bool newton_failed = false;
    for (int t = 0; t < int(mesh.triangles.size()); ++t) {
        const auto& tri = mesh.triangles[t];
        double xmin = mesh.vertices[tri[0]].x, xmax = xmin, ymin = mesh.vertices[tri[0]].y, ymax = ymin;
        for (int v : tri) {
            xmin = std::min(xmin, mesh.vertices[v].x);
            xmax = std::max(xmax, mesh.vertices[v].x);
            ymin = std::min(ymin, mesh.vertices[v].y);
            ymax = std::max(ymax, mesh.vertices[v].y);
        }
        const double pad = 0.5 * std::max(xmax - xmin, ymax - ymin);
        if (z.x < xmin - pad || z.x > xmax + pad || z.y < ymin - pad || z.y > ymax + pad) continue;
        const ElementMap map(mesh, t);
        std::array<double, 2> ref{};
        try {
            ref = map.inverse(z);
        } catch (const Error&) {
            newton_failed = true;
            continue;
        }
        const double violation = std::max({0.0, -ref[0], -ref[1], ref[0] + ref[1] - 1.0});
        if (violation < best_violation) {
            best_violation = violation;
            best = t;
            best_ref = ref;
        }
        if (violation == 0.0) break;
    }
    if (best < 0 || best_violation > 1e-9) {
        if (newton_failed) throw Error(ErrorCode::Evaluation, "element map inversion failed near the point");
        throw Error(ErrorCode::Location, "point is outside the meshed domain");
    }
    const int p = disc.dofs.element_degree[best];
    const auto& basis = reference_basis(p);
    const int nf = basis.size();
    std::vector<double> v(nf), dx(nf), dy(nf);
    basis.eval(best_ref[0], best_ref[1], v.data(), dx.data(), dy.data());
    double u = 0.0;
    for (const auto& l : disc.dofs.element_dofs(best)) u += solution.coefficients[l.global] * l.sign * v[l.basis_index];
    return u;
}

}  // namespace hpmod
