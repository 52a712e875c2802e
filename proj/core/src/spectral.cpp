#include "bipspec/spectral.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace bipspec {

HComponents h_components(const LOperator& op, const SolverState& state,
                         const EnsembleParams& params) {
    params.validate();
    if (!(state.residual <= 1e-6))
        throw std::invalid_argument("h_components: state has not converged");
    if (state.f1.size() != op.grid().size())
        throw std::invalid_argument("h_components: state does not match operator grid");

    const GridSpec& grid = op.grid();
    const cplx z = state.z;
    const auto part = [&](std::span<const cplx> f_other, double w) {
        cplx acc{0.0, 0.0};
        for (std::size_t j = 0; j < grid.t_nodes.size(); ++j) {
            const double t = grid.t_nodes[j];
            acc += grid.t_weights[j] * t * std::exp(-z * (t * t)) *
                   (std::exp(w * f_other[j + 1]) - 1.0);
        }
        return std::exp(-w) * (1.0 / z + 2.0 * acc);
    };
    HComponents h;
    h.h1 = part(state.f2, (1.0 - params.alpha) * params.p);
    h.h2 = part(state.f1, params.alpha * params.p);
    return h;
}

cplx h_total(cplx h1, cplx h2, double alpha) { return alpha * h1 + (1.0 - alpha) * h2; }

namespace {

struct PointResult {
    SolveOutcome outcome;
    int ladder_depth = 0;
};

// Direct warm-started solve; on failure, continuation downward in epsilon
// along cfg.epsilon_ladder (each rung warm-starts the next, the last rung
// is the target itself).
PointResult solve_point(const LOperator& op, double p, double alpha, cplx z_target,
                        const SolverConfig& cfg, const SolverState* warm) {
    SolveOptions so;
    so.tol = cfg.tol;
    so.max_iter = cfg.max_iter;
    so.damping = cfg.damping;

    EnsembleParams ep{p, alpha, z_target};
    PointResult r;
    r.outcome = solve_fixed_point(op, ep, so, warm);
    if (r.outcome.converged) return r;

    SolverState chain;
    const SolverState* ws = warm;
    for (double mult : cfg.epsilon_ladder) {
        ++r.ladder_depth;
        EnsembleParams rung{p, alpha, cplx{z_target.real() * mult, z_target.imag()}};
        r.outcome = solve_fixed_point(op, rung, so, ws);
        chain = r.outcome.state;
        ws = &chain;
    }
    return r;
}

}  // namespace

cplx stieltjes_g(cplx w, const WeightMeasure& m, double p, double alpha,
                 const SolverConfig& cfg) {
    if (!(w.imag() > 0.0))
        throw std::invalid_argument("stieltjes_g: Im w must be > 0");
    const cplx z{w.imag(), -w.real()};  // z = -i w, Re z = Im w > 0
    GridSpec grid = GridSpec::build(z.real(), std::fabs(z.imag()), m.max_abs_value(),
                                    cfg.grid_nodes, cfg.t_max);
    LOperator op(std::move(grid), m);
    PointResult pr = solve_point(op, p, alpha, z, cfg, nullptr);
    if (!pr.outcome.converged)
        throw std::runtime_error("stieltjes_g: fixed-point solve failed to converge");
    EnsembleParams ep{p, alpha, z};
    HComponents h = h_components(op, pr.outcome.state, ep);
    return cplx{0.0, 1.0} * h_total(h.h1, h.h2, alpha);
}

DensityCurve density(const WeightMeasure& m, double p, double alpha,
                     std::span<const double> lambda_grid, double epsilon,
                     const SolverConfig& cfg, DensityDiagnostics* diagnostics) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("density: epsilon must be > 0");
    const std::size_t n = lambda_grid.size();
    if (n == 0) throw std::invalid_argument("density: empty lambda grid");
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (!(lambda_grid[i] < lambda_grid[i + 1]))
            throw std::invalid_argument("density: lambda grid must be increasing");
    for (std::size_t i = 0; i < n; ++i)
        if (std::fabs(lambda_grid[i] + lambda_grid[n - 1 - i]) > 1e-9)
            throw std::invalid_argument("density: lambda grid must be symmetric about 0");

    const double lam_max = std::max(std::fabs(lambda_grid.front()),
                                    std::fabs(lambda_grid.back()));
    GridSpec grid = GridSpec::build(epsilon, lam_max, m.max_abs_value(),
                                    cfg.grid_nodes, cfg.t_max);
    LOperator op(std::move(grid), m);

    DensityCurve curve;
    curve.lambdas.assign(lambda_grid.begin(), lambda_grid.end());
    curve.rho.assign(n, 0.0);
    curve.converged.assign(n, 1);
    curve.epsilon = epsilon;
    curve.atom_at_zero_hint = std::fabs(1.0 - 2.0 * alpha);
    if (diagnostics) {
        diagnostics->iterations.assign(n, 0);
        diagnostics->residuals.assign(n, 0.0);
        diagnostics->ladder_depth.assign(n, 0);
    }

    std::size_t anchor = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (std::fabs(lambda_grid[i]) < std::fabs(lambda_grid[anchor])) anchor = i;

    std::vector<SolverState> kept(1);  // rolling previous state per direction
    auto record = [&](std::size_t i, const PointResult& pr) {
        EnsembleParams ep{p, alpha, pr.outcome.state.z};
        const bool ok = pr.outcome.converged;
        if (!ok) {
            curve.converged[i] = 0;
            curve.partial = true;
        }
        double rho = 0.0;
        if (pr.outcome.state.residual <= 1e-6) {
            HComponents h = h_components(op, pr.outcome.state, ep);
            rho = h_total(h.h1, h.h2, alpha).real() / M_PI;  // Im(i h) = Re h
        }
        curve.rho[i] = rho < 0.0 ? 0.0 : rho;
        if (diagnostics) {
            diagnostics->iterations[i] = pr.outcome.iterations;
            diagnostics->residuals[i] = pr.outcome.state.residual;
            diagnostics->ladder_depth[i] = pr.ladder_depth;
        }
    };

    // anchor point (cold start, ladder fallback), then sweep outward in
    // both directions warm-starting from the neighbor
    PointResult pr =
        solve_point(op, p, alpha, cplx{epsilon, -lambda_grid[anchor]}, cfg, nullptr);
    record(anchor, pr);
    SolverState anchor_state = pr.outcome.state;

    SolverState prev = anchor_state;
    for (std::size_t i = anchor + 1; i < n; ++i) {
        pr = solve_point(op, p, alpha, cplx{epsilon, -lambda_grid[i]}, cfg, &prev);
        record(i, pr);
        prev = pr.outcome.state;
    }
    prev = anchor_state;
    for (std::size_t k = anchor; k-- > 0;) {
        pr = solve_point(op, p, alpha, cplx{epsilon, -lambda_grid[k]}, cfg, &prev);
        record(k, pr);
        prev = pr.outcome.state;
    }
    return curve;
}

double density_moment(const DensityCurve& curve, int k) {
    if (k < 0 || k % 2 != 0)
        throw std::invalid_argument("density_moment: k must be even and >= 0");
    const auto& l = curve.lambdas;
    const auto& r = curve.rho;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < l.size(); ++i) {
        const double fa = std::pow(l[i], k) * r[i];
        const double fb = std::pow(l[i + 1], k) * r[i + 1];
        acc += 0.5 * (fa + fb) * (l[i + 1] - l[i]);
    }
    return acc;
}

std::vector<double> symmetric_lambda_grid(double lambda_max, int count) {
    if (!(lambda_max > 0.0) || count < 3)
        throw std::invalid_argument("symmetric_lambda_grid: need lambda_max > 0, count >= 3");
    std::vector<double> g(count);
    const double step = 2.0 * lambda_max / (count - 1);
    for (int i = 0; i < count; ++i) g[i] = -lambda_max + i * step;
    for (int i = 0; i < count / 2; ++i) g[count - 1 - i] = -g[i];
    if (count % 2 == 1) g[count / 2] = 0.0;
    return g;
}

void write_csv(const DensityCurve& curve, std::ostream& out, std::uint64_t config_hash) {
    char buf[160];
    if (config_hash != 0) {
        std::snprintf(buf, sizeof buf, "# config=%016" PRIx64 "\n", config_hash);
        out << buf;
    }
    out << "lambda,rho,epsilon,converged\n";
    for (std::size_t i = 0; i < curve.lambdas.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%d\n", curve.lambdas[i],
                      curve.rho[i], curve.epsilon, static_cast<int>(curve.converged[i]));
        out << buf;
    }
}

}  // namespace bipspec
