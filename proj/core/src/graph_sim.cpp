#include "bipspec/graph_sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <lapacke.h>

namespace bipspec {

using std::complex;

GraphSample sample_graph(int n, double p, double alpha, const WeightMeasure& m,
                         std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("sample_graph: n must be >= 2");
    if (!(p >= 0.0) || p > n)
        throw std::invalid_argument("sample_graph: need 0 <= p <= n");
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw std::invalid_argument("sample_graph: alpha must lie in (0,1)");
    if (m.kind() != MeasureKind::ExactDiscrete)
        throw std::logic_error("sample_graph: weights require an exact-discrete measure");

    GraphSample g;
    g.n = n;
    g.part_size = static_cast<int>(alpha * n);  // integer part
    g.seed = seed;
    if (g.part_size < 1 || g.part_size >= n)
        throw std::invalid_argument("sample_graph: degenerate bipartition");

    std::mt19937_64 rng(seed);
    const double q = p / n;
    for (int i = 0; i < g.part_size; ++i)
        for (int j = g.part_size; j < n; ++j) {
            const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
            if (u < q) g.edges.push_back({i, j, m.draw(rng)});
        }
    return g;
}

namespace {

std::vector<double> dense_adjacency(const GraphSample& g) {
    std::vector<double> a(static_cast<std::size_t>(g.n) * g.n, 0.0);
    for (const auto& e : g.edges) {
        a[static_cast<std::size_t>(e.i) * g.n + e.j] = e.weight;
        a[static_cast<std::size_t>(e.j) * g.n + e.i] = e.weight;
    }
    return a;
}

}  // namespace

EmpiricalSpectrum eigenvalues(const GraphSample& g) {
    std::vector<double> a = dense_adjacency(g);
    EmpiricalSpectrum s;
    s.n = g.n;
    s.eigenvalues.resize(g.n);
    const int info = LAPACKE_dsyevd(LAPACK_ROW_MAJOR, 'N', 'U', g.n, a.data(), g.n,
                                    s.eigenvalues.data());
    if (info != 0) throw std::runtime_error("eigenvalues: dsyevd failed to converge");
    return s;
}

double empirical_counting(const EmpiricalSpectrum& s, double lambda) {
    const auto& ev = s.eigenvalues;
    const auto it = std::lower_bound(ev.begin(), ev.end(), lambda);
    return static_cast<double>(it - ev.begin()) / s.n;
}

complex<double> empirical_stieltjes(const EmpiricalSpectrum& s, complex<double> w) {
    if (!(w.imag() > 0.0))
        throw std::invalid_argument("empirical_stieltjes: Im w must be > 0");
    complex<double> acc{0.0, 0.0};
    for (double ev : s.eigenvalues) acc += 1.0 / (ev - w);
    return acc / static_cast<double>(s.n);
}

GraphEigensystem GraphEigensystem::compute(const GraphSample& g) {
    GraphEigensystem sys;
    sys.n = g.n;
    sys.part_size = g.part_size;
    sys.vectors = dense_adjacency(g);
    sys.eigenvalues.resize(g.n);
    const int info = LAPACKE_dsyevd(LAPACK_ROW_MAJOR, 'V', 'U', g.n, sys.vectors.data(),
                                    g.n, sys.eigenvalues.data());
    if (info != 0)
        throw std::runtime_error("GraphEigensystem: dsyevd failed to converge");
    return sys;
}

std::vector<complex<double>> GraphEigensystem::resolvent_diag(complex<double> z) const {
    if (!(z.real() > 0.0))
        throw std::invalid_argument("resolvent_diag: Re z must be > 0");
    // (z - iA)^{-1} = V diag(1/(z - i lambda_j)) V^T for A = V diag(lambda) V^T
    std::vector<complex<double>> inv(n);
    for (int j = 0; j < n; ++j) inv[j] = 1.0 / (z - complex<double>{0.0, eigenvalues[j]});
    std::vector<complex<double>> diag(n);
#pragma omp parallel for schedule(static)
    for (int k = 0; k < n; ++k) {
        const double* row = vectors.data() + static_cast<std::size_t>(k) * n;
        double sr = 0.0, si = 0.0;
        for (int j = 0; j < n; ++j) {
            const double w = row[j] * row[j];
            sr += w * inv[j].real();
            si += w * inv[j].imag();
        }
        diag[k] = {sr, si};
    }
    return diag;
}

std::pair<complex<double>, complex<double>> empirical_f(const GraphEigensystem& sys,
                                                        double u, complex<double> z,
                                                        std::span<const double> aux_weights) {
    if (!(u >= 0.0)) throw std::invalid_argument("empirical_f: u must be >= 0");
    if (static_cast<int>(aux_weights.size()) != sys.n)
        throw std::invalid_argument("empirical_f: need one auxiliary weight per vertex");
    const std::vector<complex<double>> diag = sys.resolvent_diag(z);
    complex<double> s1{0.0, 0.0}, s2{0.0, 0.0};
    for (int k = 0; k < sys.n; ++k) {
        const double a2 = aux_weights[k] * aux_weights[k];
        const complex<double> e = std::exp(-u * a2 * diag[k]);
        if (k < sys.part_size)
            s1 += e;
        else
            s2 += e;
    }
    return {s1 / static_cast<double>(sys.part_size),
            s2 / static_cast<double>(sys.n - sys.part_size)};
}

std::pair<complex<double>, complex<double>> empirical_f(const GraphSample& g, double u,
                                                        complex<double> z,
                                                        const WeightMeasure& m,
                                                        std::uint64_t aux_seed) {
    GraphEigensystem sys = GraphEigensystem::compute(g);
    const std::vector<double> aux = m.sample(aux_seed, g.n);
    return empirical_f(sys, u, z, aux);
}

std::vector<VarianceRow> variance_experiment(const WeightMeasure& m, double p,
                                             double alpha, complex<double> w,
                                             std::span<const int> n_list, int trials,
                                             std::uint64_t seed) {
    if (!(w.imag() > 0.0))
        throw std::invalid_argument("variance_experiment: Im w must be > 0");
    if (trials < 2) throw std::invalid_argument("variance_experiment: need trials >= 2");
    std::vector<VarianceRow> rows;
    rows.reserve(n_list.size());
    for (int n : n_list) {
        std::vector<complex<double>> g_vals(trials);
        for (int t = 0; t < trials; ++t) {
            const std::uint64_t s = seed + 1000003ULL * static_cast<std::uint64_t>(n) +
                                    static_cast<std::uint64_t>(t);
            GraphSample sample = sample_graph(n, p, alpha, m, s);
            g_vals[t] = empirical_stieltjes(eigenvalues(sample), w);
        }
        complex<double> mean{0.0, 0.0};
        for (const auto& v : g_vals) mean += v;
        mean /= static_cast<double>(trials);
        double var = 0.0;
        for (const auto& v : g_vals) var += std::norm(v - mean);
        var /= static_cast<double>(trials - 1);
        rows.push_back({n, var, trials});
    }
    return rows;
}

double ks_distance(std::span<const double> cdf_a, std::span<const double> cdf_b) {
    if (cdf_a.size() != cdf_b.size())
        throw std::invalid_argument("ks_distance: CDF grids differ in length");
    double m = 0.0;
    for (std::size_t i = 0; i < cdf_a.size(); ++i)
        m = std::max(m, std::fabs(cdf_a[i] - cdf_b[i]));
    return m;
}

std::vector<double> smoothed_cdf(std::span<const double> eigenvalues,
                                 std::span<const double> grid, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("smoothed_cdf: eps must be > 0");
    std::vector<double> cdf(grid.size(), 0.0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(grid.size()); ++i) {
        double s = 0.0;
        for (double ev : eigenvalues) s += 0.5 + std::atan((grid[i] - ev) / eps) / M_PI;
        cdf[i] = s / static_cast<double>(eigenvalues.size());
    }
    return cdf;
}

double zero_fraction(const EmpiricalSpectrum& s, double tol) {
    std::size_t c = 0;
    for (double ev : s.eigenvalues)
        if (std::fabs(ev) <= tol) ++c;
    return static_cast<double>(c) / s.n;
}

}  // namespace bipspec
