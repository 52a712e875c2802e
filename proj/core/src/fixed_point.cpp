#include "bipspec/fixed_point.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bipspec/bessel.hpp"
#include "bipspec/quadrature.hpp"

namespace bipspec {

void EnsembleParams::validate() const {
    if (!std::isfinite(p) || p < 0.0)
        throw std::invalid_argument("EnsembleParams: p must be finite and >= 0");
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw std::invalid_argument("EnsembleParams: alpha must lie strictly in (0,1)");
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || !(z.real() > 0.0))
        throw std::invalid_argument("EnsembleParams: Re z must be > 0");
}

GridSpec GridSpec::build(double re_z, double im_z_max, double max_abs_weight,
                         int nodes, double t_max) {
    if (!(re_z > 0.0)) throw std::invalid_argument("GridSpec: Re z must be > 0");
    if (t_max <= 0.0) t_max = std::sqrt(40.0 / re_z);
    if (t_max < 6.0 / std::sqrt(re_z) - 1e-12)
        throw std::invalid_argument("GridSpec: t_max below the decay coverage bound");
    if (nodes <= 0) {
        const double v_max = t_max * t_max;
        const double a = std::max(max_abs_weight, 0.0);
        // Total oscillatory phase across the range: exp(-z v) contributes
        // |Im z| v_max, the Bessel factor 2 a v_max, and the slowest
        // surviving resolvent modes of the payload a sqrt(30 v_max / Re z).
        const double phase = v_max * (std::fabs(im_z_max) + 2.0 * a) +
                             a * std::sqrt(30.0 * v_max / re_z);
        nodes = std::clamp(static_cast<int>(std::ceil(0.33 * phase)) + 128, 256, 8192);
    }
    Quadrature q = gauss_legendre(nodes, 0.0, t_max);
    GridSpec g;
    g.t_nodes = std::move(q.nodes);
    g.t_weights = std::move(q.weights);
    g.t_max = t_max;
    return g;
}

SolverState SolverState::ones(GridSpec grid, cplx z) {
    SolverState s;
    const std::size_t n = grid.size();
    s.grid = std::move(grid);
    s.f1.assign(n, cplx{1.0, 0.0});
    s.f2.assign(n, cplx{1.0, 0.0});
    s.z = z;
    return s;
}

double norm_h(std::span<const cplx> values, const GridSpec& grid) {
    if (values.size() != grid.size())
        throw std::invalid_argument("norm_h: values do not span the grid");
    double m = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double a = std::abs(values[i]);
        if (!std::isfinite(a)) throw std::invalid_argument("norm_h: non-finite value");
        m = std::max(m, a / std::sqrt(1.0 + grid.u_node(i)));
    }
    return m;
}

LOperator::LOperator(GridSpec grid, WeightMeasure measure)
    : grid_(std::move(grid)), measure_(std::move(measure)), nt_(grid_.t_nodes.size()) {
    if (nt_ == 0) throw std::invalid_argument("LOperator: empty grid");
    kernel_.assign(nt_ * nt_, 0.0);
    const auto& t = grid_.t_nodes;
    const auto& gw = grid_.t_weights;
    const auto& atoms = measure_.atoms();
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(nt_); ++i) {
        double* row = kernel_.data() + static_cast<std::size_t>(i) * nt_;
        for (std::size_t j = 0; j < nt_; ++j) {
            double s = 0.0;
            for (const Atom& at : atoms) {
                const double av = std::fabs(at.value);
                if (av == 0.0) continue;
                s += at.mass * av * bessel_j1(2.0 * av * t[i] * t[j]);
            }
            row[j] = s * gw[j];
        }
    }
}

namespace {

// Per-z scratch shared across Picard iterations: the exp(-z t^2) factors
// and the closed-form column sum_a mass_a (1 - exp(-u_i a^2 / z)).
struct LContextImpl {
    cplx z;
    std::vector<cplx> expzv;   // exp(-z t_j^2)
    std::vector<cplx> closed;  // per positive u-node

    LContextImpl(const GridSpec& grid, const WeightMeasure& m, cplx z_) : z(z_) {
        const auto& t = grid.t_nodes;
        const std::size_t nt = t.size();
        expzv.resize(nt);
        closed.assign(nt, cplx{0.0, 0.0});
        const cplx inv_z = 1.0 / z;
        for (std::size_t j = 0; j < nt; ++j) expzv[j] = std::exp(-z * (t[j] * t[j]));
        for (const Atom& at : m.atoms()) {
            const double a2 = at.value * at.value;
            for (std::size_t i = 0; i < nt; ++i)
                closed[i] += at.mass * (1.0 - std::exp(-(t[i] * t[i]) * a2 * inv_z));
        }
    }
};

// out[i] = L(f)(u_i) using precomputed kernel and context. Row-parallel;
// the inner sum runs in a fixed order, so results do not depend on the
// thread count.
void apply_with_context(const GridSpec& grid, const std::vector<double>& kernel,
                        const LContextImpl& ctx, std::span<const cplx> f_in,
                        double weight, std::span<cplx> out) {
    const std::size_t nt = grid.t_nodes.size();
    const double ew = std::exp(-weight);
    std::vector<double> qr(nt), qi(nt);
    for (std::size_t j = 0; j < nt; ++j) {
        const cplx q = ctx.expzv[j] * (std::exp(weight * f_in[j + 1]) - 1.0);
        qr[j] = q.real();
        qi[j] = q.imag();
    }
    out[0] = cplx{1.0, 0.0};
    bool bad = false;
#pragma omp parallel for schedule(static) reduction(|| : bad)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(nt); ++i) {
        const double* row = kernel.data() + static_cast<std::size_t>(i) * nt;
        double sr = 0.0, si = 0.0;
#pragma omp simd reduction(+ : sr, si)
        for (std::size_t j = 0; j < nt; ++j) {
            sr += row[j] * qr[j];
            si += row[j] * qi[j];
        }
        const cplx val =
            1.0 - ew * (ctx.closed[i] + 2.0 * grid.t_nodes[i] * cplx{sr, si});
        if (!std::isfinite(val.real()) || !std::isfinite(val.imag())) bad = true;
        out[i + 1] = val;
    }
    if (bad)
        throw std::runtime_error(
            "LOperator: non-finite value (grid t_max too small for this z)");
}

}  // namespace

void LOperator::apply(std::span<const cplx> f_in, double weight, cplx z,
                      std::span<cplx> out) const {
    if (f_in.size() != grid_.size() || out.size() != grid_.size())
        throw std::invalid_argument("LOperator::apply: length mismatch with grid");
    if (!(z.real() > 0.0)) throw std::invalid_argument("LOperator::apply: Re z must be > 0");
    LContextImpl ctx(grid_, measure_, z);
    apply_with_context(grid_, kernel_, ctx, f_in, weight, out);
}

cplx LOperator::apply_at(std::span<const cplx> f_in, double weight, cplx z,
                         double u) const {
    return apply_l(f_in, grid_, measure_, weight, z, u);
}

cplx apply_l(std::span<const cplx> f_in, const GridSpec& grid, const WeightMeasure& m,
             double weight, cplx z, double u) {
    if (f_in.size() != grid.size())
        throw std::invalid_argument("apply_l: f_in does not span the grid");
    if (!(z.real() > 0.0)) throw std::invalid_argument("apply_l: Re z must be > 0");
    if (!(u >= 0.0) || !std::isfinite(u))
        throw std::invalid_argument("apply_l: u must be finite and >= 0");
    if (u == 0.0) return cplx{1.0, 0.0};

    const auto& t = grid.t_nodes;
    const auto& gw = grid.t_weights;
    const double su = std::sqrt(u);
    const cplx inv_z = 1.0 / z;

    cplx closed{0.0, 0.0};
    for (const Atom& at : m.atoms())
        closed += at.mass * (1.0 - std::exp(-u * (at.value * at.value) * inv_z));

    cplx integ{0.0, 0.0};
    for (std::size_t j = 0; j < t.size(); ++j) {
        double k = 0.0;
        for (const Atom& at : m.atoms()) {
            const double av = std::fabs(at.value);
            if (av == 0.0) continue;
            k += at.mass * av * bessel_j1(2.0 * av * su * t[j]);
        }
        const cplx q = std::exp(-z * (t[j] * t[j])) * (std::exp(weight * f_in[j + 1]) - 1.0);
        integ += gw[j] * k * q;
    }
    const cplx val = 1.0 - std::exp(-weight) * (closed + su * 2.0 * integ);
    if (!std::isfinite(val.real()) || !std::isfinite(val.imag()))
        throw std::runtime_error("apply_l: non-finite value (grid t_max too small)");
    return val;
}

SolverState apply_fz(const LOperator& op, const SolverState& state,
                     const EnsembleParams& params) {
    params.validate();
    if (state.f1.size() != op.grid().size() || state.f2.size() != op.grid().size())
        throw std::invalid_argument("apply_fz: state does not match operator grid");
    SolverState next = state;
    next.z = params.z;
    next.residual = std::numeric_limits<double>::infinity();
    op.apply(state.f2, (1.0 - params.alpha) * params.p, params.z, next.f1);
    op.apply(state.f1, params.alpha * params.p, params.z, next.f2);
    return next;
}

SolveOutcome solve_fixed_point(const LOperator& op, const EnsembleParams& params,
                               const SolveOptions& opts, const SolverState* warm_start) {
    params.validate();
    if (!(opts.tol > 0.0)) throw std::invalid_argument("solve_fixed_point: tol must be > 0");
    const GridSpec& grid = op.grid();
    const std::size_t n = grid.size();

    SolveOutcome out;
    if (warm_start) {
        if (warm_start->f1.size() != n || warm_start->f2.size() != n)
            throw std::invalid_argument("solve_fixed_point: warm start grid mismatch");
        out.state = *warm_start;
        out.state.z = params.z;
    } else {
        out.state = SolverState::ones(grid, params.z);
    }

    double damping = opts.damping;
    if (damping <= 0.0) {
        const double x1 = op.measure().moment(1);
        damping = params.z.real() >= contraction_threshold(params.p, x1) ? 1.0 : 0.5;
    }
    out.damping_used = damping;

    LContextImpl ctx(grid, op.measure(), params.z);
    const double w1 = (1.0 - params.alpha) * params.p;
    const double w2 = params.alpha * params.p;

    std::vector<cplx> g1(n), g2(n);
    auto& f1 = out.state.f1;
    auto& f2 = out.state.f2;

    for (int it = 1; it <= opts.max_iter; ++it) {
        out.iterations = it;
        apply_with_context(grid, op.kernel_, ctx, f2, w1, g1);
        apply_with_context(grid, op.kernel_, ctx, f1, w2, g2);

        double resid = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double s = 1.0 / std::sqrt(1.0 + grid.u_node(i));
            resid = std::max(resid, std::abs(g1[i] - f1[i]) * s);
            resid = std::max(resid, std::abs(g2[i] - f2[i]) * s);
        }
        out.state.residual = resid;
        if (resid <= opts.tol) {
            out.converged = true;
            return out;
        }
        for (std::size_t i = 1; i < n; ++i) {
            f1[i] = (1.0 - damping) * f1[i] + damping * g1[i];
            f2[i] = (1.0 - damping) * f2[i] + damping * g2[i];
        }
        f1[0] = f2[0] = cplx{1.0, 0.0};  // exact pinning at u = 0

        if (norm_h(f1, grid) > 2.0 + 1e-6 || norm_h(f2, grid) > 2.0 + 1e-6) {
            out.left_ball = true;
            return out;
        }
    }
    return out;
}

SolveOutcome solve_fixed_point(const EnsembleParams& params, const WeightMeasure& m,
                               GridSpec grid, double tol, int max_iter, double damping) {
    LOperator op(std::move(grid), m);
    SolveOptions opts;
    opts.tol = tol;
    opts.max_iter = max_iter;
    opts.damping = damping;
    return solve_fixed_point(op, params, opts);
}

}  // namespace bipspec
