#include "hpmod/error.hpp"
#include "hpmod/fem.hpp"

#include <map>
#include <mutex>

namespace hpmod {

namespace {

// Value with its gradient in (xi, eta).
struct Dual {
    double v = 0.0;
    double x = 0.0;
    double y = 0.0;
};

inline Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.x + b.x, a.y + b.y}; }
inline Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.x - b.x, a.y - b.y}; }
inline Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.x * b.v + a.v * b.x, a.y * b.v + a.v * b.y}; }
inline Dual operator*(double s, Dual a) { return {s * a.v, s * a.x, s * a.y}; }
inline Dual operator+(Dual a, double s) { return {a.v + s, a.x, a.y}; }

// Scaled Legendre polynomials P_n(x/t) t^n, n = 0..p.
void scaled_legendre(Dual x, Dual t, int p, std::vector<Dual>& out) {
    out.assign(p + 1, Dual{});
    out[0] = {1.0, 0.0, 0.0};
    if (p >= 1) out[1] = x;
    const Dual t2 = t * t;
    for (int n = 1; n < p; ++n) {
        out[n + 1] = (1.0 / (n + 1)) * ((2.0 * n + 1) * (x * out[n]) - double(n) * (t2 * out[n - 1]));
    }
}

// Scaled integrated Legendre polynomials, entries 2..p.
void scaled_integrated_legendre(Dual x, Dual t, int p, std::vector<Dual>& legendre, std::vector<Dual>& out) {
    scaled_legendre(x, t, p, legendre);
    out.assign(p + 1, Dual{});
    const Dual t2 = t * t;
    for (int n = 2; n <= p; ++n) out[n] = (1.0 / (2.0 * n - 1)) * (legendre[n] - t2 * legendre[n - 2]);
}

// Jacobi polynomials P_n^{(alpha, 0)}(y), n = 0..m.
void jacobi(Dual y, double alpha, int m, std::vector<Dual>& out) {
    out.assign(m + 1, Dual{});
    out[0] = {1.0, 0.0, 0.0};
    if (m >= 1) out[1] = 0.5 * ((alpha + 2.0) * y + alpha);
    for (int n = 2; n <= m; ++n) {
        const double a1 = 2.0 * n * (n + alpha) * (2.0 * n + alpha - 2.0);
        const double a2 = (2.0 * n + alpha - 1.0) * alpha * alpha;
        const double a3 = (2.0 * n + alpha - 2.0) * (2.0 * n + alpha - 1.0) * (2.0 * n + alpha);
        const double a4 = 2.0 * (n + alpha - 1.0) * (n - 1.0) * (2.0 * n + alpha);
        out[n] = (1.0 / a1) * ((a3 * y + a2) * out[n - 1] - a4 * out[n - 2]);
    }
}

}  // namespace

ReferenceBasis::ReferenceBasis(int p) : p_(p) {
    if (p < 1 || p > kMaxDegree) {
        throw Error(ErrorCode::Domain, "reference_basis: degree must lie in 1.." + std::to_string(kMaxDegree));
    }
    for (int v = 0; v < 3; ++v) functions_.push_back({Kind::Vertex, v, 1});
    for (int e = 0; e < 3; ++e) {
        for (int k = 2; k <= p; ++k) functions_.push_back({Kind::Edge, e, k});
    }
    for (int d = 3; d <= p; ++d) {
        for (int i = 2; i <= d - 1; ++i) {
            const int j = d - 1 - i;
            functions_.push_back({Kind::Bubble, -1, d, i, j});
        }
    }
}

void ReferenceBasis::eval(double xi, double eta, double* values, double* dxi, double* deta) const {
    const std::array<Dual, 3> lam{Dual{1.0 - xi - eta, -1.0, -1.0}, Dual{xi, 1.0, 0.0}, Dual{eta, 0.0, 1.0}};
    std::vector<Dual> leg, ileg;
    int idx = 0;
    auto put = [&](const Dual& d) {
        values[idx] = d.v;
        dxi[idx] = d.x;
        deta[idx] = d.y;
        ++idx;
    };
    for (int v = 0; v < 3; ++v) put(lam[v]);
    for (int e = 0; e < 3; ++e) {
        const Dual a = lam[e];
        const Dual b = lam[(e + 1) % 3];
        scaled_integrated_legendre(b - a, a + b, p_, leg, ileg);
        for (int k = 2; k <= p_; ++k) put(ileg[k]);
    }
    if (p_ >= 3) {
        scaled_integrated_legendre(lam[1] - lam[0], lam[0] + lam[1], p_, leg, ileg);
        const Dual y = 2.0 * lam[2] + (-1.0);
        std::vector<std::vector<Dual>> jacobi_of(p_ + 1);
        for (int i = 2; i <= p_ - 1; ++i) jacobi(y, 2.0 * i - 1.0, p_ - 1 - i, jacobi_of[i]);
        for (int d = 3; d <= p_; ++d) {
            for (int i = 2; i <= d - 1; ++i) {
                const int j = d - 1 - i;
                put(ileg[i] * lam[2] * jacobi_of[i][j]);
            }
        }
    }
}

const ReferenceBasis& reference_basis(int p) {
    if (p < 1 || p > kMaxDegree) {
        throw Error(ErrorCode::Domain, "reference_basis: degree must lie in 1.." + std::to_string(kMaxDegree));
    }
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<ReferenceBasis>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[p];
    if (!slot) slot = std::make_unique<ReferenceBasis>(p);
    return *slot;
}

}  // namespace hpmod
