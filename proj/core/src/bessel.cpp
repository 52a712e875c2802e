#include "bipspec/bessel.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace bipspec {

namespace {

// Power series J1(x) = (x/2) sum_k (-x^2/4)^k / (k! (k+1)!), summed in
// extended precision. Terms decay past k ~ x/2; 40 terms cover x <= 16
// to well below 1e-16.
double j1_series(double x) {
    const long double half = 0.5L * x;
    const long double q = half * half;
    long double term = half, sum = half;
    for (int k = 1; k <= 40; ++k) {
        term *= -q / (static_cast<long double>(k) * (k + 1));
        sum += term;
        if (std::fabs(static_cast<double>(term)) < 1e-20) break;
    }
    return static_cast<double>(sum);
}

// Hankel expansion J1(x) ~ sqrt(2/(pi x)) (cos(chi) P - sin(chi) Q),
// chi = x - 3 pi / 4, with a_k = prod_{j<=k} (4 - (2j-1)^2) / (k! 8^k) and
// the (-1)^m alternation per pair. Truncated at 20 terms; past the series
// cutoff the optimal-truncation error is below ~1e-13.
double j1_asymptotic(double x) {
    const long double ix = 1.0L / x;
    long double ak = 1.0L, pw = 1.0L, P = 1.0L, Q = 0.0L;
    for (int k = 1; k <= 20; ++k) {
        ak *= (4.0L - (2.0L * k - 1.0L) * (2.0L * k - 1.0L)) / (k * 8.0L);
        pw *= ix;
        const long double sgn = ((k / 2) % 2 == 0) ? 1.0L : -1.0L;
        if (k % 2 == 0)
            P += sgn * ak * pw;
        else
            Q += sgn * ak * pw;
    }
    const long double chi = x - 3.0L * M_PIl / 4.0L;
    return static_cast<double>(std::sqrt(2.0L / (M_PIl * x)) *
                               (std::cos(chi) * P - std::sin(chi) * Q));
}

}  // namespace

double bessel_j1(double x) {
    if (!std::isfinite(x) || x < 0.0)
        throw std::domain_error("bessel_j1: argument must be finite and >= 0");
    const double value = (x < bessel_j1_series_cutoff) ? j1_series(x) : j1_asymptotic(x);
    assert(std::fabs(value) <= 1.0 + 1e-12);
    return value;
}

std::complex<double> exp_resolvent_check(double u, double a, std::complex<double> R,
                                         const Quadrature& rule) {
    if (!(u >= 0.0) || !std::isfinite(u))
        throw std::invalid_argument("exp_resolvent_check: u must be finite and >= 0");
    if (!(R.real() > 0.0))
        throw std::invalid_argument("exp_resolvent_check: Re R must be > 0");
    if (rule.nodes.empty() || rule.nodes.size() != rule.weights.size())
        throw std::invalid_argument("exp_resolvent_check: malformed quadrature");

    const std::complex<double> zr = 1.0 / R;  // exponent rate, Re > 0
    const double t_end = rule.nodes.back();
    // Truncation tail of |exp(-v/R)| beyond the last node.
    if (std::exp(-zr.real() * t_end * t_end) > 1e-10)
        throw std::runtime_error("exp_resolvent_check: quadrature range too short");

    const double am = std::fabs(a), su = std::sqrt(u);
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
        const double t = rule.nodes[j];
        acc += rule.weights[j] * bessel_j1(2.0 * am * su * t) * std::exp(-zr * (t * t));
    }
    return 1.0 - su * am * 2.0 * acc;
}

}  // namespace bipspec
