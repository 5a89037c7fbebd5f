#pragma once

#include <vector>

namespace hpmod {

struct QuadratureRule1D {
    std::vector<double> nodes;    // on [0, 1]
    std::vector<double> weights;  // sum to 1
};

/// n-point Gauss-Legendre rule mapped to [0, 1]. Exact for degree 2n - 1.
const QuadratureRule1D& gauss_legendre(int n);

struct TriangleQuadrature {
    std::vector<double> xi;
    std::vector<double> eta;
    std::vector<double> weights;  // sum to 1/2, the reference area
};

/// Collapsed-coordinate (Duffy) rule on the reference triangle
/// {xi, eta >= 0, xi + eta <= 1} with n Gauss points per direction.
const TriangleQuadrature& collapsed_triangle_rule(int n);

}  // namespace hpmod
