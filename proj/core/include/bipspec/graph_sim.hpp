#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "bipspec/weight_measure.hpp"

namespace bipspec {

/// One realization of the N x N bipartite weighted adjacency matrix,
/// stored as the cross-part edge list. Vertices are 0-based; part one is
/// [0, part_size), part two [part_size, n). Every edge satisfies
/// i < part_size <= j and (i, j) pairs are unique.
struct GraphSample {
    int n = 0;
    int part_size = 0;  // integer part of alpha * n
    struct Edge {
        int i;
        int j;
        double weight;
    };
    std::vector<Edge> edges;
    std::uint64_t seed = 0;
};

/// Samples the ensemble: each cross-part pair is included independently
/// with probability p/n (pairs visited in a fixed row-major order), with
/// i.i.d. weights from `m`. Deterministic under `seed`.
/// Requires 0 <= p <= n, 0 < alpha < 1 with a nonempty smaller part, and an
/// exact-discrete measure.
GraphSample sample_graph(int n, double p, double alpha, const WeightMeasure& m,
                         std::uint64_t seed);

/// All n real eigenvalues, sorted ascending.
struct EmpiricalSpectrum {
    std::vector<double> eigenvalues;
    int n = 0;
};

/// Dense symmetric eigensolve of the adjacency matrix (LAPACK dsyevd).
/// Throws std::runtime_error if the eigensolver fails to converge.
EmpiricalSpectrum eigenvalues(const GraphSample& g);

/// Normalized counting function: fraction of eigenvalues strictly below lambda.
double empirical_counting(const EmpiricalSpectrum& s, double lambda);

/// g_N(w) = N^{-1} sum_j (lambda_j - w)^{-1} for Im w > 0; Im g_N(w) > 0.
std::complex<double> empirical_stieltjes(const EmpiricalSpectrum& s,
                                         std::complex<double> w);

/// Full eigendecomposition of a sample, kept to evaluate resolvent
/// diagonals G(z) = (z - i A)^{-1} for any Re z > 0 without refactoring.
struct GraphEigensystem {
    int n = 0;
    int part_size = 0;
    std::vector<double> eigenvalues;  // ascending
    std::vector<double> vectors;      // row-major; column j = eigenvector j

    static GraphEigensystem compute(const GraphSample& g);

    /// Diagonal of (z - i A)^{-1} via G_kk = sum_j V_kj^2 / (z - i lambda_j).
    std::vector<std::complex<double>> resolvent_diag(std::complex<double> z) const;
};

/// Finite-N statistics: part-wise averages of exp(-u a_k^2 G_kk(z)) with
/// auxiliary i.i.d. weights a_k independent of the sample. Returns
/// (f_{1,N}, f_{2,N}).
std::pair<std::complex<double>, std::complex<double>> empirical_f(
    const GraphEigensystem& sys, double u, std::complex<double> z,
    std::span<const double> aux_weights);

/// Convenience form: decomposes the sample and draws the auxiliary weights
/// from `m` under `aux_seed`.
std::pair<std::complex<double>, std::complex<double>> empirical_f(
    const GraphSample& g, double u, std::complex<double> z,
    const WeightMeasure& m, std::uint64_t aux_seed);

/// Sample variance of g_N(w) over independent trials for each matrix size.
struct VarianceRow {
    int n;
    double variance;
    int trials;
};
std::vector<VarianceRow> variance_experiment(const WeightMeasure& m, double p,
                                             double alpha, std::complex<double> w,
                                             std::span<const int> n_list, int trials,
                                             std::uint64_t seed);

/// Max absolute difference of two CDFs tabulated on a common grid.
double ks_distance(std::span<const double> cdf_a, std::span<const double> cdf_b);

/// Poisson-kernel smoothed empirical CDF on a lambda grid:
/// (1/N) sum_j [ 1/2 + atan((lambda - lambda_j)/eps) / pi ].
std::vector<double> smoothed_cdf(std::span<const double> eigenvalues,
                                 std::span<const double> grid, double eps);

/// Fraction of eigenvalues with |lambda| <= tol (the zero atom).
double zero_fraction(const EmpiricalSpectrum& s, double tol = 1e-8);

}  // namespace bipspec
