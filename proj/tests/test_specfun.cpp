#include "hpmod/error.hpp"
#include "hpmod/specfun.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace hpmod;
using namespace hpmod::specfun;

// Reference values computed with mpmath at 40 digits.

TEST_CASE("hypergeometric series") {
    auto r = hyp2f1(1.0, 1.0, 2.0, 0.5);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(1.3862943611198906).epsilon(1e-15));
    CHECK(hyp2f1(0.5, 0.5, 1.0, 0.3).value == doctest::Approx(1.0910959103627816).epsilon(1e-15));
    // terminating series
    CHECK(hyp2f1(-3.0, 2.0, 1.5, 0.4).value == doctest::Approx(0.050971428571428548).epsilon(1e-14));
    CHECK(hyp2f1(0.3, 0.7, 1.2, 0.0).value == 1.0);
}

TEST_CASE("hypergeometric series rejects bad arguments") {
    CHECK_THROWS_AS(hyp2f1(1.0, 1.0, 0.0, 0.5), Error);
    CHECK_THROWS_AS(hyp2f1(1.0, 1.0, -2.0, 0.5), Error);
    try {
        hyp2f1(1.0, 1.0, 2.0, 1.0);
        FAIL("expected a domain error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Domain);
    }
}

TEST_CASE("complete elliptic integrals") {
    struct Row {
        double k, K, E;
    };
    const Row rows[] = {
        {0.1, 1.574745561517356, 1.5668619420216683},
        {0.5, 1.685750354812596, 1.4674622093394272},
        {0.7071067811865476, 1.854074677301372, 1.3506438810476754},
        {0.9, 2.2805491384227702, 1.1716970527816141},
        {0.999, 4.4955963958421442, 1.0039944099655078},
    };
    for (const auto& r : rows) {
        CAPTURE(r.k);
        CHECK(ellip_k(r.k) == doctest::Approx(r.K).epsilon(1e-14));
        CHECK(ellip_e(r.k) == doctest::Approx(r.E).epsilon(1e-14));
        CHECK(ellip_k(EllipticModulus(r.k)) == doctest::Approx(r.K).epsilon(1e-14));
    }
    CHECK(ellip_k(0.0) == doctest::Approx(std::numbers::pi / 2).epsilon(1e-15));
    CHECK(ellip_e(1.0) == 1.0);
    CHECK_THROWS_AS(ellip_k(1.0), Error);
}

TEST_CASE("Legendre relation on random moduli") {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> dist(0.01, 0.99);
    for (int i = 0; i < 50; ++i) {
        const double k = dist(rng);
        const double lhs = ellip_e(k) * ellip_k_prime(k) + ellip_e_prime(k) * ellip_k(k) -
                           ellip_k(k) * ellip_k_prime(k);
        CAPTURE(k);
        CHECK(std::abs(lhs - std::numbers::pi / 2) <= 1e-12);
    }
}

TEST_CASE("psi and its inverse") {
    CHECK(psi(0.5) == doctest::Approx(9.4065584318614082).epsilon(1e-13));
    CHECK(psi(0.1) == doctest::Approx(0.46282190157910807).epsilon(1e-13));
    CHECK(psi_inv(2.0) == doctest::Approx(0.25895116643735362).epsilon(1e-12));
    CHECK(psi_inv(0.25) == doctest::Approx(0.061516484019639908).epsilon(1e-12));
    CHECK(std::abs(psi(square_singular_modulus()) - 1.0) <= 1e-8);
    CHECK_NOTHROW(self_check());

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(0.02, 0.98);
    for (int i = 0; i < 50; ++i) {
        const double k = dist(rng);
        CAPTURE(k);
        CHECK(std::abs(psi_inv(psi(k)) - k) <= 1e-12);
    }
}

TEST_CASE("psi is increasing") {
    double prev = 0.0;
    for (int i = 1; i < 100; ++i) {
        const double v = psi(i / 100.0);
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("Teichmueller tau") {
    CHECK(std::abs(tau(1.0) - 2.0) <= 1e-14);
    CHECK(tau(0.5) == doctest::Approx(2.340318754606268).epsilon(1e-13));
    CHECK(tau(3.0) == doctest::Approx(1.5634019226961115).epsilon(1e-13));
}

TEST_CASE("rectangle exterior modulus") {
    const double expected[] = {1.5029023346724622, 1.3104406355375631, 1.2003516691694049,
                               1.12114255114349,   1.0568153522782564, 1.0};
    for (int k = 1; k <= 6; ++k) {
        const double t = k * std::numbers::pi / 12;
        CAPTURE(k);
        CHECK(dp_rect_exterior_modulus(2 * std::sin(t / 2), 2 * std::cos(t / 2)) ==
              doctest::Approx(expected[k - 1]).epsilon(1e-12));
    }
    // swapping the sides gives the conjugate family
    const double t = std::numbers::pi / 12;
    CHECK(dp_rect_exterior_modulus(2 * std::cos(t / 2), 2 * std::sin(t / 2)) ==
          doctest::Approx(0.66537923119131814).epsilon(1e-12));
    CHECK(dp_rect_exterior_modulus(1, 2) * dp_rect_exterior_modulus(2, 1) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(dp_rect_exterior_modulus(1, 2) == doctest::Approx(1.1549248586997107).epsilon(1e-12));
}

TEST_CASE("hexagon half modulus") {
    CHECK(hexagon_half_modulus(0.2) == doctest::Approx(0.41359013824978863).epsilon(1e-12));
    CHECK(hexagon_half_modulus(0.3) == doctest::Approx(0.4495409273208463).epsilon(1e-12));
    CHECK(hexagon_half_modulus(0.4) == doctest::Approx(0.4772493440094952).epsilon(1e-12));
    CHECK(hexagon_half_modulus(0.5) == doctest::Approx(0.5).epsilon(1e-12));
}
