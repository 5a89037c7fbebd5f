#include "hpmod/quadrature.hpp"

#include "hpmod/error.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace hpmod {

namespace {

QuadratureRule1D compute_gauss_legendre(int n) {
    QuadratureRule1D rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        // Chebyshev-like initial guess, then Newton on P_n.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double pn = (n == 1) ? x : p1;
            const double pnm1 = (n == 1) ? 1.0 : p0;
            dp = n * (x * pn - pnm1) / (x * x - 1.0);
            const double dx = pn / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        // Map [-1, 1] -> [0, 1], ascending order.
        rule.nodes[n - 1 - i] = 0.5 * (x + 1.0);
        rule.weights[n - 1 - i] = 0.5 * w;
    }
    return rule;
}

}  // namespace

const QuadratureRule1D& gauss_legendre(int n) {
    if (n < 1 || n > 200) {
        throw Error(ErrorCode::InvalidParameter, "gauss_legendre: n out of range");
    }
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<QuadratureRule1D>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<QuadratureRule1D>(compute_gauss_legendre(n));
    return *slot;
}

const TriangleQuadrature& collapsed_triangle_rule(int n) {
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<TriangleQuadrature>> cache;
    const QuadratureRule1D& g = gauss_legendre(n);
    std::lock_guard lock(mutex);
    auto& slot = cache[n];
    if (!slot) {
        auto rule = std::make_unique<TriangleQuadrature>();
        for (int j = 0; j < n; ++j) {
            const double b = g.nodes[j];
            for (int i = 0; i < n; ++i) {
                const double a = g.nodes[i];
                rule->xi.push_back(a * (1.0 - b));
                rule->eta.push_back(b);
                rule->weights.push_back(g.weights[i] * g.weights[j] * (1.0 - b));
            }
        }
        slot = std::move(rule);
    }
    return *slot;
}

}  // namespace hpmod
