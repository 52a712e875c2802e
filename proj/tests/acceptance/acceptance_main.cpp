// Acceptance suite: runs every acceptance criterion end to end and prints
// one [PASS]/[FAIL] line per criterion. Exit code = number of failures.
//
// An optional argument restricts the run to a comma-separated list of
// criterion ids (e.g. "./bipspec_acceptance 1,2,5").
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bipspec/bessel.hpp"
#include "bipspec/fixed_point.hpp"
#include "bipspec/graph_sim.hpp"
#include "bipspec/quadrature.hpp"
#include "bipspec/spectral.hpp"

using namespace bipspec;

namespace {

// ---------------------------------------------------------------- helpers

struct Check {
    bool pass = true;
    std::string detail;
};

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

SolverConfig tight_solver() {
    SolverConfig cfg;
    cfg.tol = 1e-11;
    cfg.max_iter = 6000;
    return cfg;
}

double norm_h_diff(const std::vector<cplx>& a, const std::vector<cplx>& b,
                   const GridSpec& grid) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]) / std::sqrt(1.0 + grid.u_node(i)));
    return m;
}

// density curves are reused across criteria; cache by parameter key
std::map<std::string, DensityCurve> g_curve_cache;
std::map<std::string, DensityDiagnostics> g_diag_cache;

std::string measure_key(const WeightMeasure& m) {
    std::ostringstream ss;
    for (const Atom& a : m.atoms()) ss << a.value << ":" << a.mass << ";";
    return ss.str();
}

const DensityCurve& run_curve(const WeightMeasure& m, double p, double alpha,
                              double eps, double lam_max, int count, int nodes = 0,
                              double t_max = 0.0,
                              const DensityDiagnostics** diag_out = nullptr) {
    const std::string key = fmt("%s|%.17g|%.17g|%.17g|%.17g|%d|%d|%.17g",
                                measure_key(m).c_str(), p, alpha, eps, lam_max, count,
                                nodes, t_max);
    auto it = g_curve_cache.find(key);
    if (it == g_curve_cache.end()) {
        SolverConfig cfg = tight_solver();
        cfg.grid_nodes = nodes;
        cfg.t_max = t_max;
        DensityDiagnostics diag;
        const std::vector<double> grid = symmetric_lambda_grid(lam_max, count);
        DensityCurve c = density(m, p, alpha, grid, eps, cfg, &diag);
        it = g_curve_cache.emplace(key, std::move(c)).first;
        g_diag_cache.emplace(key, std::move(diag));
    }
    if (diag_out) *diag_out = &g_diag_cache.find(key)->second;
    return it->second;
}

std::vector<double> cumulative_cdf(const DensityCurve& c) {
    std::vector<double> cdf(c.lambdas.size(), 0.0);
    double acc = 0.0;
    for (std::size_t i = 1; i < cdf.size(); ++i) {
        acc += 0.5 * (c.rho[i - 1] + c.rho[i]) * (c.lambdas[i] - c.lambdas[i - 1]);
        cdf[i] = acc;
    }
    const double tail = std::max(0.0, 0.5 * (1.0 - acc));
    for (double& v : cdf) v += tail;
    return cdf;
}

// quadratic Richardson extrapolation to eps = 0 on the schedule {4h, 2h, h}
double extrapolate_eps(double y4h, double y2h, double yh) {
    return (8.0 * yh - 6.0 * y2h + y4h) / 3.0;
}

const WeightMeasure& delta1() {
    static const WeightMeasure m = WeightMeasure::point_mass(1.0);
    return m;
}

// -------------------------------------------------------------- criteria

// quadrature evaluation of the resolvent identity matches its closed form
Check c1_kernel_identity() {
    const cplx rs[] = {{1.0, 0.0}, {1.0, 1.0}, {2.0, -1.0}, {0.2, 0.0}};
    double worst = 0.0;
    for (cplx R : rs) {
        const double rate = (1.0 / R).real();
        const Quadrature q = gauss_legendre(512, 0.0, std::sqrt(42.0 / rate));
        for (double u : {0.0, 0.5, 1.0, 2.0, 5.0})
            for (double a : {0.5, 1.0, 2.0})
                worst = std::max(worst, std::abs(exp_resolvent_check(u, a, R, q) -
                                                 std::exp(-u * a * a * R)));
    }
    return {worst <= 1e-8, fmt("max |rhs - exp(-u a^2 R)| = %.2e (60 cases)", worst)};
}

// p = 0 closed forms: f, h, g and the smoothed density
Check c2_degenerate_closed_form() {
    const WeightMeasure m = WeightMeasure::from_atoms({{1.0, 0.5}, {2.0, 0.5}});
    double worst = 0.0;

    const cplx z{1.5, -0.7};
    const GridSpec grid = GridSpec::build(z.real(), std::fabs(z.imag()), 2.0);
    const LOperator op(grid, m);
    const EnsembleParams params{0.0, 0.4, z};
    SolveOptions so;
    so.tol = 1e-12;
    const SolveOutcome out = solve_fixed_point(op, params, so);
    if (!out.converged) return {false, "p=0 solve did not converge"};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        cplx closed{0.0, 0.0};
        for (const Atom& at : m.atoms())
            closed += at.mass * std::exp(-grid.u_node(i) * at.value * at.value / z);
        worst = std::max(worst, std::abs(out.state.f1[i] - closed));
    }

    const HComponents h = h_components(op, out.state, params);
    worst = std::max(worst, std::abs(h.h1 - 1.0 / z));
    worst = std::max(worst, std::abs(h.h2 - 1.0 / z));

    const double eps = 0.25;
    const cplx g = stieltjes_g(cplx{0.0, eps}, m, 0.0, 0.4, tight_solver());
    worst = std::max(worst, std::abs(g - cplx{0.0, 1.0 / eps}));

    const DensityCurve c = run_curve(m, 0.0, 0.5, 0.1, 2.0, 41);
    for (std::size_t i = 0; i < c.lambdas.size(); ++i) {
        const double exact =
            0.1 / (M_PI * (c.lambdas[i] * c.lambdas[i] + 0.01));
        worst = std::max(worst, std::fabs(c.rho[i] - exact));
    }
    return {worst <= 1e-8, fmt("max deviation from closed forms = %.2e", worst)};
}

// residual quality across the spectral window for all six configurations
Check c3_fixed_point_quality() {
    int total = 0, good = 0;
    double worst_resid = 0.0;
    for (double p : {0.5, 2.0, 4.0})
        for (double alpha : {0.3, 0.5}) {
            const DensityDiagnostics* diag = nullptr;
            const DensityCurve& c =
                run_curve(delta1(), p, alpha, 0.05, 6.0, 61, 0, 0.0, &diag);
            for (std::size_t i = 0; i < c.lambdas.size(); ++i) {
                ++total;
                if (c.converged[i] && diag->residuals[i] <= 1e-10) ++good;
                worst_resid = std::max(worst_resid, diag->residuals[i]);
            }
        }
    const double frac = static_cast<double>(good) / total;
    return {frac >= 0.99, fmt("residual <= 1e-10 at %d/%d points (%.1f%%), worst %.1e",
                              good, total, 100.0 * frac, worst_resid)};
}

// measured Lipschitz ratio of the paired map over random ball elements
Check c4_contraction_certificate() {
    std::mt19937_64 rng(90210);
    double worst = 0.0;
    for (double p : {0.5, 2.0, 4.0}) {
        const double re_z = contraction_threshold(p, delta1().moment(1));
        const GridSpec grid = GridSpec::build(re_z, 0.0, 1.0);
        const LOperator op(grid, delta1());
        const EnsembleParams params{p, 0.3, cplx{re_z, 0.0}};
        std::uniform_real_distribution<double> mag(0.0, 2.0), phase(0.0, 2.0 * M_PI);
        for (int pair = 0; pair < 50; ++pair) {
            SolverState a = SolverState::ones(grid, params.z);
            SolverState b = a;
            for (std::size_t i = 0; i < grid.size(); ++i) {
                const double s = std::sqrt(1.0 + grid.u_node(i));
                const double r1 = mag(rng), t1 = phase(rng);
                const double r2 = mag(rng), t2 = phase(rng);
                a.f1[i] = s * r1 * cplx{std::cos(t1), std::sin(t1)};
                a.f2[i] = s * r2 * cplx{std::cos(t2), std::sin(t2)};
                const double r3 = mag(rng), t3 = phase(rng);
                const double r4 = mag(rng), t4 = phase(rng);
                b.f1[i] = s * r3 * cplx{std::cos(t3), std::sin(t3)};
                b.f2[i] = s * r4 * cplx{std::cos(t4), std::sin(t4)};
            }
            const SolverState fa = apply_fz(op, a, params);
            const SolverState fb = apply_fz(op, b, params);
            const double num = std::max(norm_h_diff(fa.f1, fb.f1, grid),
                                        norm_h_diff(fa.f2, fb.f2, grid));
            const double den = std::max(norm_h_diff(a.f1, b.f1, grid),
                                        norm_h_diff(a.f2, b.f2, grid));
            worst = std::max(worst, num / den);
        }
    }
    return {worst < 1.0, fmt("max Lipschitz ratio over 150 pairs = %.3f", worst)};
}

// alpha swap, evenness in lambda, component symmetry at alpha = 1/2
Check c5_symmetries() {
    std::string detail;

    const DensityCurve& a = run_curve(delta1(), 2.0, 0.3, 0.05, 6.0, 61);
    const DensityCurve& b = run_curve(delta1(), 2.0, 0.7, 0.05, 6.0, 61);
    double swap = 0.0;
    for (std::size_t i = 0; i < a.rho.size(); ++i)
        swap = std::max(swap, std::fabs(a.rho[i] - b.rho[i]));

    double hswap = 0.0;
    for (cplx z : {cplx{0.05, -1.3}, cplx{1.0, -2.0}, cplx{3.0, 0.0}}) {
        const GridSpec grid = GridSpec::build(z.real(), std::fabs(z.imag()), 1.0);
        const LOperator op(grid, delta1());
        SolveOptions so;
        so.tol = 1e-12;
        so.max_iter = 20000;
        const SolveOutcome oa = solve_fixed_point(op, {2.0, 0.3, z}, so);
        const SolveOutcome ob = solve_fixed_point(op, {2.0, 0.7, z}, so);
        if (!oa.converged || !ob.converged) return {false, "swap solve failed"};
        const HComponents ha = h_components(op, oa.state, {2.0, 0.3, z});
        const HComponents hb = h_components(op, ob.state, {2.0, 0.7, z});
        hswap = std::max(hswap, std::abs(h_total(ha.h1, ha.h2, 0.3) -
                                         h_total(hb.h1, hb.h2, 0.7)));
    }

    double even = 0.0;
    for (const DensityCurve* c : {&a, &b}) {
        const std::size_t n = c->rho.size();
        for (std::size_t i = 0; i < n; ++i)
            even = std::max(even, std::fabs(c->rho[i] - c->rho[n - 1 - i]));
    }

    const cplx z{0.05, -1.0};
    const GridSpec grid = GridSpec::build(z.real(), 1.0, 1.0);
    const LOperator op(grid, delta1());
    SolveOptions so;
    so.tol = 1e-12;
    so.max_iter = 20000;
    const SolveOutcome half = solve_fixed_point(op, {2.0, 0.5, z}, so);
    if (!half.converged) return {false, "alpha=1/2 solve failed"};
    double fsym = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        fsym = std::max(fsym, std::abs(half.state.f1[i] - half.state.f2[i]));

    const bool pass = swap <= 1e-8 && hswap <= 1e-8 && even <= 2e-6 && fsym <= 1e-12;
    return {pass, fmt("swap(rho) %.1e, swap(h) %.1e, evenness %.1e, f1=f2 %.1e", swap,
                      hswap, even, fsym)};
}

// eps-extrapolated second moment against 2 a (1-a) p X2
Check c6_second_moment_law() {
    double worst = 0.0;
    for (double p : {0.5, 2.0, 4.0})
        for (double alpha : {0.3, 0.5}) {
            double m2s[3];
            int k = 0;
            for (double eps : {0.2, 0.1, 0.05})
                m2s[k++] = density_moment(run_curve(delta1(), p, alpha, eps, 6.0, 121), 2);
            const double extrap = extrapolate_eps(m2s[0], m2s[1], m2s[2]);
            const double law = 2.0 * alpha * (1.0 - alpha) * p * delta1().moment(2);
            const double rel = std::fabs(extrap / law - 1.0);
            worst = std::max(worst, rel);
        }
    return {worst <= 0.02, fmt("max relative deviation = %.3f%%", 100.0 * worst)};
}

// weak convergence: seed-averaged smoothed empirical CDF vs prediction
Check c7_weak_convergence() {
    const double eps = 0.05;
    const DensityCurve& pred = run_curve(delta1(), 2.0, 0.5, eps, 6.0, 481);
    const std::vector<double> pred_cdf = cumulative_cdf(pred);

    std::vector<double> pooled;
    for (int k = 0; k < 20; ++k) {
        const GraphSample g = sample_graph(2000, 2.0, 0.5, delta1(), 41000 + k);
        const EmpiricalSpectrum s = eigenvalues(g);
        pooled.insert(pooled.end(), s.eigenvalues.begin(), s.eigenvalues.end());
    }
    const std::vector<double> emp_cdf = smoothed_cdf(pooled, pred.lambdas, eps);
    const double ks = ks_distance(emp_cdf, pred_cdf);
    return {ks <= 0.05, fmt("KS = %.4f (N=2000, 20 seeds)", ks)};
}

// finite-N statistics against the solver at matching (u, z)
Check c8_empirical_f() {
    const double p = 2.0, alpha = 0.5;
    const cplx zs[] = {{3.0, 0.0}, {1.0, -2.0}};
    const double us[] = {0.5, 1.0, 2.0};

    // solver side, per z
    std::vector<LOperator> ops;
    std::vector<SolveOutcome> solved;
    ops.reserve(2);
    for (int zi = 0; zi < 2; ++zi) {
        const cplx z = zs[zi];
        ops.emplace_back(GridSpec::build(z.real(), std::fabs(z.imag()), 1.0), delta1());
        SolveOptions so;
        so.tol = 1e-12;
        solved.push_back(solve_fixed_point(ops[zi], {p, alpha, z}, so));
        if (!solved.back().converged) return {false, "solver side failed"};
    }

    // finite-N side: average over 10 samples at N = 2000
    cplx sum1[2][3] = {}, sum2[2][3] = {};
    const int seeds = 10;
    for (int k = 0; k < seeds; ++k) {
        const GraphSample g = sample_graph(2000, p, alpha, delta1(), 42000 + k);
        const GraphEigensystem sys = GraphEigensystem::compute(g);
        const std::vector<double> aux = delta1().sample(52000 + k, g.n);
        for (int zi = 0; zi < 2; ++zi)
            for (int ui = 0; ui < 3; ++ui) {
                const auto [f1, f2] = empirical_f(sys, us[ui], zs[zi], aux);
                sum1[zi][ui] += f1;
                sum2[zi][ui] += f2;
            }
    }

    double worst = 0.0;
    for (int zi = 0; zi < 2; ++zi)
        for (int ui = 0; ui < 3; ++ui) {
            const SolveOutcome& out = solved[zi];
            const cplx f1_solver = ops[zi].apply_at(out.state.f2, (1.0 - alpha) * p,
                                                    zs[zi], us[ui]);
            const cplx f2_solver =
                ops[zi].apply_at(out.state.f1, alpha * p, zs[zi], us[ui]);
            worst = std::max(worst, std::abs(sum1[zi][ui] / double(seeds) - f1_solver));
            worst = std::max(worst, std::abs(sum2[zi][ui] / double(seeds) - f2_solver));
        }
    return {worst <= 0.02, fmt("max |f_N - f| = %.4f over 12 (u,z,part) combos", worst)};
}

// variance decay of the empirical Stieltjes transform
Check c9_variance_decay() {
    const std::vector<int> sizes{250, 500, 1000, 2000};
    const auto rows = variance_experiment(delta1(), 2.0, 0.5, cplx{0.0, 1.0}, sizes,
                                          200, 43000);
    bool monotone = true;
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (!(rows[i].variance < rows[i - 1].variance)) monotone = false;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& r : rows) {
        const double x = std::log(double(r.n)), y = std::log(r.variance);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = double(rows.size());
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return {monotone && slope <= -0.3,
            fmt("variances %.2e/%.2e/%.2e/%.2e, slope %.2f", rows[0].variance,
                rows[1].variance, rows[2].variance, rows[3].variance, slope)};
}

// rank-forced zero atom: per-sample floor and the predicted bump at 0
Check c10_zero_atom() {
    const double alpha = 0.3, p = 2.0, eps = 0.05;
    double min_frac = 1.0;
    for (int k = 0; k < 20; ++k) {
        const GraphSample g = sample_graph(2000, p, alpha, delta1(), 44000 + k);
        min_frac = std::min(min_frac, zero_fraction(eigenvalues(g)));
    }

    const double delta = 0.5;
    const DensityCurve& c = run_curve(delta1(), p, alpha, eps, 0.6, 97);
    double bump = 0.0;
    for (std::size_t i = 0; i + 1 < c.lambdas.size(); ++i) {
        if (c.lambdas[i] < -delta || c.lambdas[i + 1] > delta) continue;
        bump += 0.5 * (c.rho[i] + c.rho[i + 1]) * (c.lambdas[i + 1] - c.lambdas[i]);
    }
    const double leak = 1.0 - (2.0 / M_PI) * std::atan(delta / eps);
    const double floor = 0.4 * (1.0 - leak);
    const bool pass = min_frac >= 0.4 && bump >= floor;
    return {pass, fmt("min zero fraction %.4f (>= 0.4), bump mass %.4f (>= %.4f)",
                      min_frac, bump, floor)};
}

// truncation convergence of densities for a wide three-atom law
Check c11_truncation() {
    const WeightMeasure wide =
        WeightMeasure::from_atoms({{0.5, 0.4}, {1.5, 0.5}, {10.0, 0.1}});
    const int nodes = 3072;
    const DensityCurve& full = run_curve(wide, 2.0, 0.5, 0.05, 6.0, 61, nodes);
    double sup[3];
    int k = 0;
    for (double t : {2.0, 5.0, 20.0}) {
        const DensityCurve& ct = run_curve(wide.truncated(t), 2.0, 0.5, 0.05, 6.0, 61,
                                           nodes);
        double s = 0.0;
        for (std::size_t i = 0; i < ct.rho.size(); ++i)
            s = std::max(s, std::fabs(ct.rho[i] - full.rho[i]));
        sup[k++] = s;
    }
    const bool pass = sup[0] > sup[1] && sup[1] > sup[2] && sup[2] < 1e-6;
    return {pass, fmt("sup gaps T=2/5/20: %.3e / %.3e / %.3e", sup[0], sup[1], sup[2])};
}

// grid robustness of the predicted CDF (doubled nodes and range)
Check c12_grid_robustness() {
    const double eps = 0.05;
    const DensityCurve& base = run_curve(delta1(), 2.0, 0.5, eps, 6.0, 481);
    const GridSpec auto_grid = GridSpec::build(eps, 6.0, 1.0);
    const int n2 = 2 * static_cast<int>(auto_grid.t_nodes.size());
    const double t2 = 2.0 * auto_grid.t_max;
    const DensityCurve& fine = run_curve(delta1(), 2.0, 0.5, eps, 6.0, 481, n2, t2);

    const std::vector<double> cdf_a = cumulative_cdf(base);
    const std::vector<double> cdf_b = cumulative_cdf(fine);
    double sup = 0.0;
    for (std::size_t i = 0; i < cdf_a.size(); ++i)
        sup = std::max(sup, std::fabs(cdf_a[i] - cdf_b[i]));
    return {sup < 1e-6, fmt("sup |CDF - CDF_2x| = %.2e (nodes %zu -> %d)", sup,
                            auto_grid.t_nodes.size(), n2)};
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> only;
    if (argc > 1) {
        std::stringstream ss(argv[1]);
        std::string tok;
        while (std::getline(ss, tok, ',')) only.insert(std::atoi(tok.c_str()));
    }

    struct Entry {
        int id;
        const char* name;
        std::function<Check()> run;
    };
    const Entry entries[] = {
        {1, "kernel-identity", c1_kernel_identity},
        {2, "degenerate-closed-form", c2_degenerate_closed_form},
        {3, "fixed-point-quality", c3_fixed_point_quality},
        {4, "contraction-certificate", c4_contraction_certificate},
        {5, "symmetries", c5_symmetries},
        {6, "second-moment-law", c6_second_moment_law},
        {7, "weak-convergence", c7_weak_convergence},
        {8, "finite-n-statistics", c8_empirical_f},
        {9, "variance-decay", c9_variance_decay},
        {10, "zero-atom", c10_zero_atom},
        {11, "truncation", c11_truncation},
        {12, "grid-robustness", c12_grid_robustness},
    };

    int failures = 0;
    for (const Entry& e : entries) {
        if (!only.empty() && !only.count(e.id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Check c;
        try {
            c = e.run();
        } catch (const std::exception& ex) {
            c = {false, std::string("exception: ") + ex.what()};
        }
        const double dt =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("[%s] C%-2d %-24s %s [%.1f s]\n", c.pass ? "PASS" : "FAIL", e.id,
                    e.name, c.detail.c_str(), dt);
        std::fflush(stdout);
        if (!c.pass) ++failures;
    }
    return failures;
}
