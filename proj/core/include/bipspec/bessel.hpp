#pragma once

#include <complex>

#include "bipspec/quadrature.hpp"

namespace bipspec {

/// Bessel function of the first kind, order 1, for real x >= 0.
///
/// Power series below the crossover, Hankel asymptotic expansion above,
/// both summed in extended precision. Absolute error stays below ~1e-13
/// over the whole half-line, and |J1(x)| <= 1 everywhere.
/// Throws std::domain_error for negative or non-finite input.
double bessel_j1(double x);

/// Crossover argument between the power series and the asymptotic branch.
inline constexpr double bessel_j1_series_cutoff = 16.0;

/// Right-hand side of the exponential-resolvent identity
///
///   exp(-u a^2 R) = 1 - sqrt(u) |a| Int_0^inf J1(2|a| sqrt(u v)) / sqrt(v)
///                                           * exp(-v / R) dv
///
/// evaluated numerically with the substitution v = t^2. `rule` must be a
/// quadrature over t in [0, T]; its range is checked against the decay of
/// the integrand and the call fails (std::runtime_error) when the
/// estimated truncation tail exceeds 1e-10. Requires u >= 0, Re R > 0.
///
/// Used by tests as the master validation of the half-line quadrature
/// scheme shared with the fixed-point solver.
std::complex<double> exp_resolvent_check(double u, double a, std::complex<double> R,
                                         const Quadrature& rule);

}  // namespace bipspec
