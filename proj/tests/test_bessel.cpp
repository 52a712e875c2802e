#include <cmath>
#include <stdexcept>
#include <complex>
#include <limits>

#include <doctest.h>

#include "bipspec/bessel.hpp"
#include "bipspec/quadrature.hpp"

using namespace bipspec;
using cplx = std::complex<double>;

namespace {

// Independent oracle: direct summation of the defining series to 60 terms
// in extended precision. Valid for moderate arguments.
double j1_series_oracle(double x) {
    const long double half = 0.5L * x;
    long double term = half, sum = half;
    for (int k = 1; k <= 60; ++k) {
        term *= -(half * half) / (static_cast<long double>(k) * (k + 1));
        sum += term;
    }
    return static_cast<double>(sum);
}

Quadrature half_line_rule(cplx R, int n = 384) {
    const double rate = (1.0 / R).real();
    return gauss_legendre(n, 0.0, std::sqrt(42.0 / rate));
}

}  // namespace

TEST_SUITE("bessel") {

TEST_CASE("j1 at zero") { CHECK(bessel_j1(0.0) == 0.0); }

TEST_CASE("j1 reference value at 2") {
    CHECK(bessel_j1(2.0) == doctest::Approx(0.576724807756873).epsilon(1e-12));
    CHECK(std::fabs(bessel_j1(2.0) - j1_series_oracle(2.0)) < 1e-13);
}

TEST_CASE("j1 against series oracle on moderate arguments") {
    for (double x = 0.0; x <= 20.0; x += 0.0137)
        CHECK(std::fabs(bessel_j1(x) - j1_series_oracle(x)) < 5e-12);
}

TEST_CASE("j1 against the standard library on the half line") {
    for (double x = 0.01; x <= 1200.0; x *= 1.17) {
        const double ref = std::cyl_bessel_j(1.0, x);
        CHECK(std::fabs(bessel_j1(x) - ref) < 5e-12);
    }
}

TEST_CASE("j1 magnitude bound on [0, 1000]") {
    for (double x = 0.0; x <= 1000.0; x += 0.37) CHECK(std::fabs(bessel_j1(x)) <= 1.0);
}

TEST_CASE("branch continuity at the series cutoff") {
    const double below = std::nextafter(bessel_j1_series_cutoff, 0.0);
    const double above = std::nextafter(bessel_j1_series_cutoff,
                                        std::numeric_limits<double>::infinity());
    CHECK(std::fabs(bessel_j1(below) - bessel_j1(above)) < 1e-12);
}

TEST_CASE("j1 rejects bad input") {
    CHECK_THROWS_AS(bessel_j1(-1.0), std::domain_error);
    CHECK_THROWS_AS(bessel_j1(std::numeric_limits<double>::quiet_NaN()),
                    std::domain_error);
    CHECK_THROWS_AS(bessel_j1(std::numeric_limits<double>::infinity()),
                    std::domain_error);
}

TEST_CASE("exp-resolvent identity: trivial and frozen values") {
    const Quadrature q = half_line_rule(cplx{1.0, 0.0});
    CHECK(exp_resolvent_check(0.0, 1.0, cplx{1.0, 0.0}, q) == cplx{1.0, 0.0});

    const cplx v1 = exp_resolvent_check(1.0, 1.0, cplx{1.0, 0.0}, q);
    CHECK(std::abs(v1 - cplx{0.3678794411714423, 0.0}) < 1e-10);

    const cplx R{0.5, -0.5};  // 1/(1+i)
    const cplx v2 = exp_resolvent_check(2.0, 1.0, R, half_line_rule(R));
    CHECK(std::abs(v2 - std::exp(-2.0 * R)) < 1e-10);
}

TEST_CASE("exp-resolvent identity over the master grid") {
    // the master validation of the quadrature scheme used by the solver
    const cplx rs[] = {{1.0, 0.0}, {1.0, 1.0}, {2.0, -1.0}, {0.2, 0.0}};
    for (cplx R : rs) {
        const Quadrature q = half_line_rule(R, 512);
        for (double u : {0.0, 0.5, 1.0, 2.0, 5.0})
            for (double a : {0.5, 1.0, 2.0}) {
                const cplx lhs = std::exp(-u * a * a * R);
                const cplx rhs = exp_resolvent_check(u, a, R, q);
                CAPTURE(u);
                CAPTURE(a);
                CAPTURE(R.real());
                CAPTURE(R.imag());
                CHECK(std::abs(lhs - rhs) < 1e-8);
            }
    }
}

TEST_CASE("exp-resolvent reports an inadequate quadrature range") {
    const Quadrature q = gauss_legendre(64, 0.0, 3.0);  // tail exp(-9/200) ~ 1
    CHECK_THROWS_AS(exp_resolvent_check(1.0, 1.0, cplx{200.0, 0.0}, q),
                    std::runtime_error);
    CHECK_THROWS_AS(exp_resolvent_check(1.0, 1.0, cplx{-1.0, 0.0}, q),
                    std::invalid_argument);
    CHECK_THROWS_AS(exp_resolvent_check(-0.5, 1.0, cplx{1.0, 0.0}, q),
                    std::invalid_argument);
}

}  // TEST_SUITE
