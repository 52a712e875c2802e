#pragma once

#include <complex>
#include <limits>
#include <span>
#include <vector>

#include "bipspec/weight_measure.hpp"

namespace bipspec {

using cplx = std::complex<double>;

/// Ensemble parameters for one spectral-parameter solve.
/// p is the edge intensity (each cross-part edge present with probability
/// p/N), alpha in (0,1) the part ratio, z the resolvent parameter with
/// Re z > 0. p = 0 is admitted as the degenerate closed-form case.
struct EnsembleParams {
    double p = 0.0;
    double alpha = 0.5;
    cplx z{1.0, 0.0};

    /// Throws std::invalid_argument when a field is out of range.
    void validate() const;
};

/// Half-line quadrature grid shared by the solver state and the kernel
/// integrals. The rule lives in t with v = t^2, which removes the
/// 1/sqrt(v) singularity of the kernel; the function grid is
/// u in {0} + {t_j^2}, so applying the operator needs no interpolation.
struct GridSpec {
    std::vector<double> t_nodes;    // Gauss-Legendre nodes on (0, t_max)
    std::vector<double> t_weights;  // matching weights
    double t_max = 0.0;

    /// Number of function samples, including the pinned u = 0 node.
    std::size_t size() const { return t_nodes.size() + 1; }
    /// u-coordinate of sample i (i = 0 is the explicit u = 0 node).
    double u_node(std::size_t i) const {
        return i == 0 ? 0.0 : t_nodes[i - 1] * t_nodes[i - 1];
    }

    /// Builds a grid adequate for Re z = re_z and |Im z| up to im_z_max,
    /// with edge weights bounded by max_abs_weight.
    ///
    /// t_max defaults to sqrt(40 / re_z) so the exp(-Re z * v) factor
    /// decays to ~1e-17 at the end of the range; it must satisfy
    /// t_max >= 6 / sqrt(re_z). The node count defaults to an estimate
    /// proportional to the total oscillatory phase of the kernel across
    /// the range (Bessel factor + exp(-z v) + slow resolvent modes), so
    /// grids are larger near the real axis and for wide weight support.
    static GridSpec build(double re_z, double im_z_max, double max_abs_weight,
                          int nodes = 0, double t_max = 0.0);
};

/// Pair (f1, f2) tabulated on a shared grid for one z.
/// f1[0] = f2[0] = 1 exactly (the operator is pinned at u = 0), and both
/// components stay in the ball of radius 2 of the weighted sup norm.
struct SolverState {
    GridSpec grid;
    std::vector<cplx> f1;  // values at u_node(i)
    std::vector<cplx> f2;
    cplx z{};
    /// Residual max_i ||F_z(f)_i - f_i|| of the returned state; infinity
    /// until produced by solve_fixed_point.
    double residual = std::numeric_limits<double>::infinity();

    /// State f1 = f2 = 1 on `grid` (exact at u = 0 and the p = 0 solution).
    static SolverState ones(GridSpec grid, cplx z);
};

/// Weighted sup norm max_i |f(u_i)| / sqrt(1 + u_i) over the grid nodes.
/// Throws std::invalid_argument on a non-finite value or a length mismatch.
double norm_h(std::span<const cplx> values, const GridSpec& grid);

class LOperator;

struct SolveOptions {
    double tol = 1e-11;
    int max_iter = 4000;
    /// Picard mixing factor in (0, 1]; 0 selects the default policy
    /// (1.0 when Re z >= contraction_threshold, 0.5 below it).
    double damping = 0.0;
};

struct SolveOutcome {
    SolverState state;
    bool converged = false;
    bool left_ball = false;  // an iterate left the ball of radius 2
    int iterations = 0;
    double damping_used = 0.0;
};

/// Damped Picard iteration f <- (1 - d) f + d F_z(f) from f = 1 (or from
/// `warm_start` when given), until max_i ||F_z(f)_i - f_i|| <= tol.
/// The residual reported belongs to the returned state. Non-convergence
/// and ball exit are reported in the outcome, not thrown; callers fall
/// back to continuation.
SolveOutcome solve_fixed_point(const LOperator& op, const EnsembleParams& params,
                               const SolveOptions& opts = {},
                               const SolverState* warm_start = nullptr);

/// The Bessel-kernel integral transform
///
///   L(f)(u) = 1 - sqrt(u) e^{-w} Int |a| dmu(a)
///                 Int_0^inf J1(2|a| sqrt(u v)) / sqrt(v)
///                           exp(-z v + w f(v)) dv
///
/// discretized on a GridSpec. The J1 kernel matrix (measure-weighted, z-
/// independent) is precomputed at construction; one application then costs
/// two real matrix-vector products per component.
///
/// The quadrature evaluates the rearranged form in which the f-independent
/// part of the integral is replaced by its closed form (the exponential-
/// resolvent identity), so only the payload exp(w f(v)) - 1 is integrated
/// numerically. Both forms agree analytically; the rearranged one keeps the
/// discretization error tied to the decaying payload instead of the
/// long-range oscillatory tail, and is exact at w = 0.
class LOperator {
public:
    LOperator(GridSpec grid, WeightMeasure measure);

    /// Full-grid application: out[i] = L(f_in)(u_i). f_in and out span the
    /// whole grid including the u = 0 slot; out[0] = 1 always.
    void apply(std::span<const cplx> f_in, double weight, cplx z,
               std::span<cplx> out) const;

    /// Pointwise application at an arbitrary u >= 0 (used for h-extraction
    /// checks and grid-refinement comparisons).
    cplx apply_at(std::span<const cplx> f_in, double weight, cplx z, double u) const;

    const GridSpec& grid() const { return grid_; }
    const WeightMeasure& measure() const { return measure_; }

private:
    GridSpec grid_;
    WeightMeasure measure_;
    std::vector<double> kernel_;  // row i: sum_a mass|a| J1(2|a| t_i t_j) gw_j
    std::size_t nt_ = 0;

    friend SolveOutcome solve_fixed_point(const LOperator&, const EnsembleParams&,
                                          const SolveOptions&, const SolverState*);
};

/// Spec-shaped convenience wrapper around LOperator::apply_at; builds the
/// kernel row on the fly.
cplx apply_l(std::span<const cplx> f_in, const GridSpec& grid, const WeightMeasure& m,
             double weight, cplx z, double u);

/// One application of the paired map: f1' = L(f2) with weight (1-alpha)p,
/// f2' = L(f1) with weight alpha p, both at params.z.
SolverState apply_fz(const LOperator& op, const SolverState& state,
                     const EnsembleParams& params);

/// Re z above which the damped iteration provably contracts for edge
/// intensity p and first absolute weight moment x1 (used by the default
/// damping policy and the contraction certificate tests).
inline double contraction_threshold(double p, double x1) { return 4.0 * p * x1 + 4.0; }

/// Convenience overload building the operator internally.
SolveOutcome solve_fixed_point(const EnsembleParams& params, const WeightMeasure& m,
                               GridSpec grid, double tol, int max_iter,
                               double damping);

}  // namespace bipspec
