#include "hpmod/error.hpp"
#include "hpmod/fem.hpp"

#include <algorithm>
#include <limits>
#include <cmath>

namespace hpmod {

ElementMap::ElementMap(const Mesh& mesh, int element) {
    const auto& tri = mesh.triangles.at(element);
    for (int i = 0; i < 3; ++i) v_[i] = mesh.vertices[tri[i]];
    for (int e = 0; e < 3; ++e) {
        const int a = e;
        const int b = (e + 1) % 3;
        const int be = mesh.boundary_edge(tri[a], tri[b]);
        if (be < 0) continue;
        const auto& edge = mesh.boundary_edges[be];
        if (!edge.curve) continue;
        sides_.push_back({a, b, *edge.curve, edge.v0 == tri[a]});
    }
    curved_ = !sides_.empty();
}

void ElementMap::eval(double xi, double eta, Point2& x, std::array<double, 4>* jac) const {
    const double lam[3] = {1.0 - xi - eta, xi, eta};
    static constexpr double dlam_dxi[3] = {-1.0, 1.0, 0.0};
    static constexpr double dlam_deta[3] = {-1.0, 0.0, 1.0};

    x = lam[0] * v_[0] + lam[1] * v_[1] + lam[2] * v_[2];
    Point2 dxi = v_[1] - v_[0];
    Point2 deta = v_[2] - v_[0];

    for (const auto& side : sides_) {
        const double la = lam[side.a];
        const double lb = lam[side.b];
        const double s = std::clamp(0.5 * (1.0 + lb - la), 1e-12, 1.0 - 1e-12);
        const double ds_dxi = 0.5 * (dlam_dxi[side.b] - dlam_dxi[side.a]);
        const double ds_deta = 0.5 * (dlam_deta[side.b] - dlam_deta[side.a]);

        const double u = side.forward ? s : 1.0 - s;
        const Point2 gamma = side.curve.point(u);
        const Point2 dgamma = side.curve.derivative(u) * (side.forward ? 1.0 : -1.0);
        const Point2 A = v_[side.a];
        const Point2 B = v_[side.b];
        const Point2 d = gamma - (A + s * (B - A));
        const Point2 dd = dgamma - (B - A);
        const double q = s * (1.0 - s);
        const Point2 g = d / q;
        const Point2 dg = (dd * q - d * (1.0 - 2.0 * s)) / (q * q);

        const double w = la * lb;
        x += w * g;
        if (jac) {
            const double dw_dxi = dlam_dxi[side.a] * lb + la * dlam_dxi[side.b];
            const double dw_deta = dlam_deta[side.a] * lb + la * dlam_deta[side.b];
            dxi += dw_dxi * g + (w * ds_dxi) * dg;
            deta += dw_deta * g + (w * ds_deta) * dg;
        }
    }
    if (jac) *jac = {dxi.x, deta.x, dxi.y, deta.y};
}

Point2 ElementMap::map(double xi, double eta) const {
    Point2 x;
    eval(xi, eta, x, nullptr);
    return x;
}

std::array<double, 4> ElementMap::jacobian(double xi, double eta) const {
    Point2 x;
    std::array<double, 4> j{};
    eval(xi, eta, x, &j);
    return j;
}

std::array<double, 2> ElementMap::inverse(const Point2& z) const {
    const Point2 e1 = v_[1] - v_[0];
    const Point2 e2 = v_[2] - v_[0];
    const double det = cross(e1, e2);
    const Point2 r0 = z - v_[0];
    double xi = cross(r0, e2) / det;
    double eta = cross(e1, r0) / det;
    if (!curved_) return {xi, eta};

    const double size = std::max({norm(e1), norm(e2), norm(v_[2] - v_[1])});
    // Rounding in x limits the attainable residual for small elements far
    // from the origin.
    const double floor = 8.0 * std::numeric_limits<double>::epsilon() * std::max(norm(z), size);
    xi = std::clamp(xi, -0.5, 1.5);
    eta = std::clamp(eta, -0.5, 1.5);
    std::array<double, 2> best{xi, eta};
    double best_r = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 60; ++it) {
        Point2 x;
        std::array<double, 4> j{};
        eval(xi, eta, x, &j);
        const Point2 r = z - x;
        if (norm(r) < best_r) {
            best_r = norm(r);
            best = {xi, eta};
        }
        if (norm(r) <= floor) return {xi, eta};
        const double dj = j[0] * j[3] - j[1] * j[2];
        if (!(std::abs(dj) > 0.0)) break;
        const double dxi = (j[3] * r.x - j[1] * r.y) / dj;
        const double deta = (-j[2] * r.x + j[0] * r.y) / dj;
        xi += dxi;
        eta += deta;
        if (std::abs(dxi) + std::abs(deta) < 1e-14) return {xi, eta};
        if (std::abs(xi) > 10.0 || std::abs(eta) > 10.0) break;
    }
    if (best_r <= 1e-10 * size) return best;
    throw Error(ErrorCode::Evaluation, "element map inversion did not converge");
}

}  // namespace hpmod
