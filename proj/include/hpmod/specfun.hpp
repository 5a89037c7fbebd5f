#pragma once

// Closed-form special functions used as analytic references for the modulus
// computations: Gauss hypergeometric series, complete elliptic integrals (AGM),
// the Duren-Pfaltzgraff function psi, Teichmueller's tau.
//
// Every function here is pure and thread-safe.

namespace hpmod::specfun {

/// Elliptic modulus k in [0, 1] with its complement k' = sqrt(1 - k^2).
class EllipticModulus {
public:
    explicit EllipticModulus(double k);

    double k() const noexcept { return k_; }
    /// Computed as sqrt((1-k)(1+k)) to keep precision near k = 1.
    double complement() const noexcept;

private:
    double k_;
};

/// Result of a series or iteration together with its convergence metadata.
struct SpecialValue {
    double value = 0.0;
    bool converged = false;
    long terms_or_iterations = 0;
};

inline constexpr double kSeriesRelTol = 1e-16;
inline constexpr long kSeriesMaxTerms = 1'000'000;

/// Gauss series 2F1(a, b; c; z) for real arguments and |z| < 1.
/// Throws Error{InvalidParameter} when c is a non-positive integer,
/// Error{Domain} when |z| >= 1, NonConvergenceError when the term cap is hit.
SpecialValue hyp2f1(double a, double b, double c, double z);

/// Complete elliptic integral of the first kind, K(k) = (pi/2) 2F1(1/2,1/2;1;k^2),
/// by the arithmetic-geometric mean. k = 1 throws Error{Divergence}.
double ellip_k(double k);
double ellip_k(EllipticModulus k);
/// Complete elliptic integral of the second kind by the AGM with the
/// Gauss correction sum. Defined on [0, 1], E(1) = 1.
double ellip_e(double k);
double ellip_e(EllipticModulus k);
/// K'(k) = K(k'), E'(k) = E(k').
double ellip_k_prime(double k);
double ellip_e_prime(double k);

/// psi(k) = 2 (E(k) - (1-k) K(k)) / (E'(k) - k K'(k)) on (0, 1).
/// Strictly increasing from 0 to infinity.
double psi(double k);

/// Inverse of psi on (0, inf): bisection on (1e-15, 1 - 1e-15) followed by a
/// safeguarded secant polish to |psi(k) - x| <= 1e-13 max(1, x).
double psi_inv(double x);

/// Exterior modulus of an a-by-b rectangle for the curve family lying outside
/// the rectangle and joining the two opposite sides of length b:
/// K'(k) / (2 K(k)) with k = psi_inv(a / b).
double dp_rect_exterior_modulus(double a, double b);

/// Teichmueller modulus function tau(t) = 2 K(1/sqrt(1+t)) / K(sqrt(t/(1+t))).
double tau(double t);

/// Modulus of the family joining [0, ih] and [1, 1+ih] in the upper half-plane
/// outside the rectangle [0,1]x[0,h]: K'(k) / (4 K(k)), k = psi_inv(1/(2h)).
double hexagon_half_modulus(double h);

/// The singular modulus (sqrt(2) - 1)^2 = 3 - 2 sqrt(2) for which psi(k) = 1.
double square_singular_modulus();

/// Verifies psi(3 - 2 sqrt 2) = 1 within 1e-8. Throws Error{InvalidParameter}
/// on failure; a failure means psi uses the wrong argument convention.
void self_check();

}  // namespace hpmod::specfun
