#include "hpmod/specfun.hpp"

#include "hpmod/error.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace hpmod::specfun {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_nonpositive_integer(double c) {
    return c <= 0.0 && std::floor(c) == c;
}

void check_modulus(double k, const char* fn) {
    if (!(k >= 0.0 && k <= 1.0)) {
        throw Error(ErrorCode::Domain, std::string(fn) + ": modulus outside [0, 1]");
    }
}

double complement_of(double k) {
    return std::sqrt((1.0 - k) * (1.0 + k));
}

// AGM(1, k') together with the Gauss sum  sum_n 2^(n-1) c_n^2, c_0 = k.
struct AgmResult {
    double mean;
    double correction;
};

AgmResult agm(double k, double kp) {
    double a = 1.0;
    double b = kp;
    double c = k;
    double power = 0.5;
    double sum = power * c * c;
    for (int it = 0; it < 64; ++it) {
        const double an = 0.5 * (a + b);
        const double bn = std::sqrt(a * b);
        c = 0.5 * (a - b);
        power *= 2.0;
        sum += power * c * c;
        a = an;
        b = bn;
        if (std::abs(a - b) <= 4.0 * std::numeric_limits<double>::epsilon() * a) {
            break;
        }
    }
    return {0.5 * (a + b), sum};
}

}  // namespace

EllipticModulus::EllipticModulus(double k) : k_(k) {
    check_modulus(k, "EllipticModulus");
}

double EllipticModulus::complement() const noexcept {
    return complement_of(k_);
}

SpecialValue hyp2f1(double a, double b, double c, double z) {
    if (is_nonpositive_integer(c)) {
        throw Error(ErrorCode::InvalidParameter, "hyp2f1: c is a non-positive integer");
    }
    if (!(std::abs(z) < 1.0)) {
        throw Error(ErrorCode::Domain, "hyp2f1: |z| >= 1");
    }
    SpecialValue out;
    double term = 1.0;
    double sum = 1.0;
    for (long n = 0; n < kSeriesMaxTerms; ++n) {
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z;
        sum += term;
        if (std::abs(term) <= kSeriesRelTol * std::abs(sum)) {
            out.value = sum;
            out.converged = true;
            out.terms_or_iterations = n + 1;
            return out;
        }
    }
    throw NonConvergenceError("hyp2f1: term cap reached", sum, kSeriesMaxTerms);
}

double ellip_k(double k) {
    check_modulus(k, "ellip_k");
    if (k == 1.0) {
        throw Error(ErrorCode::Divergence, "ellip_k: K(1) diverges");
    }
    return kPi / (2.0 * agm(k, complement_of(k)).mean);
}

double ellip_k(EllipticModulus k) { return ellip_k(k.k()); }

double ellip_e(double k) {
    check_modulus(k, "ellip_e");
    if (k == 1.0) return 1.0;
    const AgmResult r = agm(k, complement_of(k));
    return kPi / (2.0 * r.mean) * (1.0 - r.correction);
}

double ellip_e(EllipticModulus k) { return ellip_e(k.k()); }

double ellip_k_prime(double k) {
    check_modulus(k, "ellip_k_prime");
    if (k == 0.0) {
        throw Error(ErrorCode::Divergence, "ellip_k_prime: K'(0) diverges");
    }
    return ellip_k(complement_of(k));
}

double ellip_e_prime(double k) {
    check_modulus(k, "ellip_e_prime");
    return ellip_e(complement_of(k));
}

double psi(double k) {
    if (!(k > 0.0 && k < 1.0)) {
        throw Error(ErrorCode::Domain, "psi: k outside (0, 1)");
    }
    const double kk = ellip_k(k);
    const double ek = ellip_e(k);
    const double kkp = ellip_k_prime(k);
    const double ekp = ellip_e_prime(k);
    return 2.0 * (ek - (1.0 - k) * kk) / (ekp - k * kkp);
}

double psi_inv(double x) {
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw Error(ErrorCode::Domain, "psi_inv: x must be positive and finite");
    }
    double lo = 1e-15;
    double hi = 1.0 - 1e-15;
    const double tol = 1e-13 * std::max(1.0, x);
    // psi is increasing: f(lo) < 0 < f(hi) for every admissible x.
    for (int it = 0; it < 200 && hi - lo > 1e-9 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (psi(mid) < x) lo = mid; else hi = mid;
    }
    double k0 = lo;
    double k1 = hi;
    double f0 = psi(k0) - x;
    double f1 = psi(k1) - x;
    double best = std::abs(f0) < std::abs(f1) ? k0 : k1;
    double best_f = std::min(std::abs(f0), std::abs(f1));
    for (int it = 0; it < 60 && best_f > tol; ++it) {
        double k2 = (f1 != f0) ? k1 - f1 * (k1 - k0) / (f1 - f0) : 0.5 * (lo + hi);
        if (!(k2 > lo && k2 < hi)) k2 = 0.5 * (lo + hi);
        const double f2 = psi(k2) - x;
        if (f2 < 0.0) lo = k2; else hi = k2;
        if (std::abs(f2) < best_f) {
            best = k2;
            best_f = std::abs(f2);
        }
        if (k2 == k1) break;
        k0 = k1;
        f0 = f1;
        k1 = k2;
        f1 = f2;
    }
    return best;
}

double dp_rect_exterior_modulus(double a, double b) {
    if (!(a > 0.0 && b > 0.0)) {
        throw Error(ErrorCode::Domain, "dp_rect_exterior_modulus: sides must be positive");
    }
    const double k = psi_inv(a / b);
    return ellip_k_prime(k) / (2.0 * ellip_k(k));
}

double tau(double t) {
    if (!(t > 0.0)) {
        throw Error(ErrorCode::Domain, "tau: t must be positive");
    }
    return 2.0 * ellip_k(1.0 / std::sqrt(1.0 + t)) / ellip_k(std::sqrt(t / (1.0 + t)));
}

double hexagon_half_modulus(double h) {
    if (!(h > 0.0)) {
        throw Error(ErrorCode::Domain, "hexagon_half_modulus: h must be positive");
    }
    const double k = psi_inv(1.0 / (2.0 * h));
    return ellip_k_prime(k) / (4.0 * ellip_k(k));
}

double square_singular_modulus() {
    return 3.0 - 2.0 * std::numbers::sqrt2;
}

void self_check() {
    const double v = psi(square_singular_modulus());
    if (!(std::abs(v - 1.0) <= 1e-8)) {
        throw Error(ErrorCode::InvalidParameter,
                    "specfun self-check failed: psi(3 - 2 sqrt 2) = " + std::to_string(v));
    }
}

}  // namespace hpmod::specfun
