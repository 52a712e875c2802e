#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "bipspec/fixed_point.hpp"

namespace bipspec {

/// Smoothed spectral density on a symmetric lambda grid.
struct DensityCurve {
    std::vector<double> lambdas;          // increasing, symmetric about 0
    std::vector<double> rho;              // >= 0 (negatives clipped at -1e-12)
    double epsilon = 0.0;                 // smoothing used
    double atom_at_zero_hint = 0.0;       // in [0,1]; rank bound |1-2 alpha|
                                          // until overwritten by a measured
                                          // exact-zero fraction
    std::vector<std::uint8_t> converged;  // per-lambda solver success
    bool partial = false;                 // true when any point failed
};

/// Per-lambda solver diagnostics collected while building a curve.
struct DensityDiagnostics {
    std::vector<int> iterations;
    std::vector<double> residuals;
    std::vector<int> ladder_depth;  // number of continuation rungs used
};

struct HComponents {
    cplx h1;
    cplx h2;
};

/// Solver knobs threaded through the spectral layer. grid_nodes/t_max = 0
/// pick the automatic GridSpec sizing.
struct SolverConfig {
    int grid_nodes = 0;
    double t_max = 0.0;
    double tol = 1e-11;
    int max_iter = 4000;
    double damping = 0.0;  // 0 = policy default
    /// Multiples of the target epsilon used when continuing downward after
    /// a failed solve (descending, ending at 1).
    std::vector<double> epsilon_ladder{4.0, 2.828427124746190, 2.0,
                                       1.414213562373095, 1.0};
};

/// The pair (h1, h2) extracted from a converged state via the analytic
/// u -> 0 limit of the operator:
///
///   h1(z) = e^{-(1-alpha) p} Int_0^inf exp(-z v + (1-alpha) p f2(v, z)) dv
///   h2(z) = e^{-alpha p}     Int_0^inf exp(-z v + alpha p     f1(v, z)) dv
///
/// (the second-moment factors of the u-derivative cancel). Both components
/// have positive real part for Re z > 0. Throws std::invalid_argument when
/// the state has not converged.
HComponents h_components(const LOperator& op, const SolverState& state,
                         const EnsembleParams& params);

/// alpha * h1 + (1 - alpha) * h2.
cplx h_total(cplx h1, cplx h2, double alpha);

/// Stieltjes transform g(w) = Int dsigma(lambda) / (lambda - w) of the
/// limiting measure, for Im w > 0. Solves the fixed point at z = -i w
/// (so Re z = Im w > 0) and returns i h(-i w); Im g(w) > 0.
cplx stieltjes_g(cplx w, const WeightMeasure& m, double p, double alpha,
                 const SolverConfig& cfg = {});

/// Smoothed density rho_eps(lambda) = Im g(lambda + i eps) / pi on the
/// given symmetric grid. Points are solved sweeping outward from the
/// smallest |lambda|, each warm-started from its neighbor; the anchor point
/// and any failing point are continued downward in epsilon along
/// cfg.epsilon_ladder. Failures that survive the ladder are flagged in
/// `converged` and mark the curve partial.
DensityCurve density(const WeightMeasure& m, double p, double alpha,
                     std::span<const double> lambda_grid, double epsilon,
                     const SolverConfig& cfg = {},
                     DensityDiagnostics* diagnostics = nullptr);

/// Trapezoid integral of lambda^k rho over the curve window; k must be even
/// (odd moments vanish by symmetry and are meaningless under smoothing).
double density_moment(const DensityCurve& curve, int k);

/// Evenly spaced symmetric grid with `count` points on [-lambda_max, lambda_max].
std::vector<double> symmetric_lambda_grid(double lambda_max, int count);

/// CSV emission: header "lambda,rho,epsilon,converged" preceded by a
/// provenance comment when `config_hash` is nonzero.
void write_csv(const DensityCurve& curve, std::ostream& out,
               std::uint64_t config_hash = 0);

}  // namespace bipspec
