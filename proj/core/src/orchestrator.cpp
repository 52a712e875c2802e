#include "bipspec/orchestrator.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <functional>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <json.hpp>

#include "bipspec/graph_sim.hpp"

namespace bipspec {

namespace fs = std::filesystem;
using nlohmann::json;

WeightMeasure MeasureSpec::build() const {
    WeightMeasure m = [&] {
        switch (type) {
            case Type::Atoms:
                return WeightMeasure::from_atoms(atoms);
            case Type::PointMass:
                return WeightMeasure::point_mass(value);
            case Type::TwoPoint:
                return WeightMeasure::symmetric_two_point(value);
            case Type::Gaussian:
                return WeightMeasure::gaussian(stddev, nodes);
            case Type::Uniform:
                return WeightMeasure::uniform(lo, hi, nodes);
        }
        throw ConfigError("measure: unknown type");
    }();
    return truncation > 0.0 ? m.truncated(truncation) : m;
}

namespace {

MeasureSpec measure_from_json(const json& j) {
    MeasureSpec ms;
    const std::string type = j.at("type").get<std::string>();
    if (type == "atoms") {
        ms.type = MeasureSpec::Type::Atoms;
        for (const auto& pair : j.at("atoms")) {
            if (!pair.is_array() || pair.size() != 2)
                throw ConfigError("measure.atoms entries must be [value, mass] pairs");
            ms.atoms.push_back({pair[0].get<double>(), pair[1].get<double>()});
        }
    } else if (type == "point_mass") {
        ms.type = MeasureSpec::Type::PointMass;
        ms.value = j.at("value").get<double>();
    } else if (type == "two_point") {
        ms.type = MeasureSpec::Type::TwoPoint;
        ms.value = j.at("value").get<double>();
    } else if (type == "gaussian") {
        ms.type = MeasureSpec::Type::Gaussian;
        ms.stddev = j.at("std").get<double>();
        ms.nodes = j.value("nodes", 64);
    } else if (type == "uniform") {
        ms.type = MeasureSpec::Type::Uniform;
        ms.lo = j.at("lo").get<double>();
        ms.hi = j.at("hi").get<double>();
        ms.nodes = j.value("nodes", 64);
    } else {
        throw ConfigError("measure.type must be one of atoms|point_mass|two_point|gaussian|uniform");
    }
    ms.truncation = j.value("truncation", 0.0);
    return ms;
}

json measure_to_json(const MeasureSpec& ms) {
    json j;
    switch (ms.type) {
        case MeasureSpec::Type::Atoms: {
            j["type"] = "atoms";
            json arr = json::array();
            for (const Atom& a : ms.atoms) arr.push_back({a.value, a.mass});
            j["atoms"] = arr;
            break;
        }
        case MeasureSpec::Type::PointMass:
            j["type"] = "point_mass";
            j["value"] = ms.value;
            break;
        case MeasureSpec::Type::TwoPoint:
            j["type"] = "two_point";
            j["value"] = ms.value;
            break;
        case MeasureSpec::Type::Gaussian:
            j["type"] = "gaussian";
            j["std"] = ms.stddev;
            j["nodes"] = ms.nodes;
            break;
        case MeasureSpec::Type::Uniform:
            j["type"] = "uniform";
            j["lo"] = ms.lo;
            j["hi"] = ms.hi;
            j["nodes"] = ms.nodes;
            break;
    }
    if (ms.truncation > 0.0) j["truncation"] = ms.truncation;
    return j;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex_hash(std::uint64_t h) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << text;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    try {
        ExperimentConfig c;
        c.measure = measure_from_json(j.at("measure"));
        c.p = j.at("p").get<double>();
        c.alpha = j.at("alpha").get<double>();
        c.lambda_max = j.value("lambda_max", c.lambda_max);
        c.lambda_count = j.value("lambda_count", c.lambda_count);
        c.epsilon = j.value("epsilon", c.epsilon);
        if (j.contains("epsilon_schedule"))
            c.epsilon_schedule = j["epsilon_schedule"].get<std::vector<double>>();
        if (j.contains("solver")) {
            const json& s = j["solver"];
            c.solver.grid_nodes = s.value("grid_nodes", 0);
            c.solver.t_max = s.value("t_max", 0.0);
            c.solver.tol = s.value("tol", c.solver.tol);
            c.solver.max_iter = s.value("max_iter", c.solver.max_iter);
            c.solver.damping = s.value("damping", 0.0);
        }
        if (j.contains("mc")) {
            const json& m = j["mc"];
            if (m.contains("n_list")) c.mc.n_list = m["n_list"].get<std::vector<int>>();
            c.mc.trials = m.value("trials", c.mc.trials);
            c.mc.seeds = m.value("seeds", c.mc.seeds);
            c.mc.n = m.value("n", c.mc.n);
            c.mc.base_seed = m.value("base_seed", c.mc.base_seed);
        }
        c.output_dir = j.value("output_dir", c.output_dir);
        c.validate();
        return c;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config field error: ") + e.what());
    }
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

std::string ExperimentConfig::to_json_text() const {
    json j;
    j["measure"] = measure_to_json(measure);
    j["p"] = p;
    j["alpha"] = alpha;
    j["lambda_max"] = lambda_max;
    j["lambda_count"] = lambda_count;
    j["epsilon"] = epsilon;
    j["epsilon_schedule"] = epsilon_schedule;
    j["solver"] = {{"grid_nodes", solver.grid_nodes}, {"t_max", solver.t_max},
                   {"tol", solver.tol},               {"max_iter", solver.max_iter},
                   {"damping", solver.damping}};
    j["mc"] = {{"n_list", mc.n_list}, {"trials", mc.trials}, {"seeds", mc.seeds},
               {"n", mc.n},           {"base_seed", mc.base_seed}};
    j["output_dir"] = output_dir;
    return j.dump(2) + "\n";
}

std::uint64_t ExperimentConfig::hash() const { return fnv1a(to_json_text()); }

void ExperimentConfig::validate() const {
    try {
        (void)measure.build();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("measure: ") + e.what());
    }
    if (!(p >= 0.0) || !std::isfinite(p)) throw ConfigError("p must be finite and >= 0");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
    if (!(lambda_max > 0.0)) throw ConfigError("lambda_max must be > 0");
    if (lambda_count < 3) throw ConfigError("lambda_count must be >= 3");
    if (!(epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
    if (epsilon_schedule.empty()) throw ConfigError("epsilon_schedule must be nonempty");
    for (double e : epsilon_schedule)
        if (!(e > 0.0)) throw ConfigError("epsilon_schedule entries must be > 0");
    if (!(solver.tol > 0.0)) throw ConfigError("solver.tol must be > 0");
    if (solver.max_iter < 1) throw ConfigError("solver.max_iter must be >= 1");
    if (solver.damping < 0.0 || solver.damping > 1.0)
        throw ConfigError("solver.damping must lie in [0,1]");
    if (mc.n < 2) throw ConfigError("mc.n must be >= 2");
    if (p > mc.n) throw ConfigError("p must not exceed mc.n");
    if (mc.trials < 2) throw ConfigError("mc.trials must be >= 2");
    if (mc.seeds < 1) throw ConfigError("mc.seeds must be >= 1");
    if (mc.n_list.empty()) throw ConfigError("mc.n_list must be nonempty");
    for (int n : mc.n_list) {
        if (n < 2) throw ConfigError("mc.n_list entries must be >= 2");
        if (p > n) throw ConfigError("p must not exceed every mc.n_list entry");
    }
}

void set_parallelism(int jobs) {
#ifdef _OPENMP
    omp_set_num_threads(std::max(1, jobs));
#else
    (void)jobs;
#endif
}

namespace {

// Shared by cmd_solve / cmd_compare: density curve on the configured grid
// plus its diagnostics.
struct CurveRun {
    DensityCurve curve;
    DensityDiagnostics diag;
    std::vector<double> grid;
};

CurveRun run_density(const ExperimentConfig& cfg) {
    CurveRun r;
    r.grid = symmetric_lambda_grid(cfg.lambda_max, cfg.lambda_count);
    r.curve = density(cfg.measure.build(), cfg.p, cfg.alpha, r.grid, cfg.epsilon,
                      cfg.solver, &r.diag);
    return r;
}

// Predicted CDF: cumulative trapezoid of rho plus the symmetric below-window
// tail (sigma is symmetric, so half the missing mass sits on each side).
std::vector<double> predicted_cdf(const DensityCurve& c) {
    const std::size_t n = c.lambdas.size();
    std::vector<double> cdf(n, 0.0);
    double acc = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        acc += 0.5 * (c.rho[i - 1] + c.rho[i]) * (c.lambdas[i] - c.lambdas[i - 1]);
        cdf[i] = acc;
    }
    const double tail = std::max(0.0, 0.5 * (1.0 - acc));
    for (double& v : cdf) v += tail;
    return cdf;
}

struct SimResults {
    struct PerSeed {
        std::uint64_t seed;
        std::size_t edges;
        double sum_sq_eigen;
        double sum_sq_weights;
        double zero_frac;
    };
    std::vector<PerSeed> per_seed;
    std::vector<double> pooled_eigenvalues;
};

SimResults run_simulation(const ExperimentConfig& cfg, const WeightMeasure& m) {
    SimResults r;
    for (int k = 0; k < cfg.mc.seeds; ++k) {
        const std::uint64_t seed = cfg.mc.base_seed + static_cast<std::uint64_t>(k);
        GraphSample g = sample_graph(cfg.mc.n, cfg.p, cfg.alpha, m, seed);
        EmpiricalSpectrum s = eigenvalues(g);
        double ss = 0.0;
        for (double ev : s.eigenvalues) ss += ev * ev;
        double ws = 0.0;
        for (const auto& e : g.edges) ws += e.weight * e.weight;
        r.per_seed.push_back({seed, g.edges.size(), ss, ws, zero_fraction(s)});
        r.pooled_eigenvalues.insert(r.pooled_eigenvalues.end(), s.eigenvalues.begin(),
                                    s.eigenvalues.end());
    }
    return r;
}

int guarded(const ExperimentConfig& cfg, const std::string& out_dir, int jobs,
            const std::function<void(const fs::path&)>& body) {
    try {
        cfg.validate();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    try {
        set_parallelism(jobs);
        const fs::path dir = out_dir.empty() ? fs::path(cfg.output_dir) : fs::path(out_dir);
        fs::create_directories(dir);
        body(dir);
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace

int cmd_solve(const ExperimentConfig& cfg, const std::string& out_dir, int jobs) {
    return guarded(cfg, out_dir, jobs, [&](const fs::path& dir) {
        CurveRun r = run_density(cfg);
        {
            std::ofstream out(dir / "density.csv", std::ios::binary);
            write_csv(r.curve, out, cfg.hash());
        }
        json j;
        j["config_hash"] = hex_hash(cfg.hash());
        j["partial"] = r.curve.partial;
        j["epsilon"] = r.curve.epsilon;
        j["mass"] = density_moment(r.curve, 0);
        j["second_moment"] = density_moment(r.curve, 2);
        j["atom_at_zero_hint"] = r.curve.atom_at_zero_hint;
        j["iterations"] = r.diag.iterations;
        j["residuals"] = r.diag.residuals;
        j["ladder_depth"] = r.diag.ladder_depth;
        j["converged"] = std::vector<int>(r.curve.converged.begin(), r.curve.converged.end());
        write_text_file(dir / "solve_diagnostics.json", j.dump(2) + "\n");
    });
}

int cmd_simulate(const ExperimentConfig& cfg, const std::string& out_dir, int jobs) {
    return guarded(cfg, out_dir, jobs, [&](const fs::path& dir) {
        const WeightMeasure m = cfg.measure.build();
        SimResults r = run_simulation(cfg, m);

        std::ofstream csv(dir / "spectra.csv", std::ios::binary);
        char buf[128];
        std::snprintf(buf, sizeof buf, "# config=%s\n", hex_hash(cfg.hash()).c_str());
        csv << buf << "seed,index,lambda\n";
        std::size_t pos = 0;
        for (const auto& ps : r.per_seed)
            for (int i = 0; i < cfg.mc.n; ++i, ++pos) {
                std::snprintf(buf, sizeof buf, "%" PRIu64 ",%d,%.17g\n", ps.seed, i,
                              r.pooled_eigenvalues[pos]);
                csv << buf;
            }

        const std::vector<double> grid = symmetric_lambda_grid(cfg.lambda_max, cfg.lambda_count);
        const std::vector<double> cdf = smoothed_cdf(r.pooled_eigenvalues, grid, cfg.epsilon);

        json j;
        j["config_hash"] = hex_hash(cfg.hash());
        j["n"] = cfg.mc.n;
        j["seeds"] = cfg.mc.seeds;
        double mean_edges = 0.0, mean_zero = 0.0;
        json per_seed = json::array();
        for (const auto& ps : r.per_seed) {
            mean_edges += static_cast<double>(ps.edges);
            mean_zero += ps.zero_frac;
            per_seed.push_back({{"seed", ps.seed},
                                {"edges", ps.edges},
                                {"sum_sq_eigen", ps.sum_sq_eigen},
                                {"sum_sq_weights", ps.sum_sq_weights},
                                {"zero_fraction", ps.zero_frac}});
        }
        j["per_seed"] = per_seed;
        j["mean_edge_count"] = mean_edges / cfg.mc.seeds;
        j["mean_zero_fraction"] = mean_zero / cfg.mc.seeds;
        j["expected_edge_count"] =
            static_cast<double>(cfg.mc.n - static_cast<int>(cfg.alpha * cfg.mc.n)) *
            static_cast<int>(cfg.alpha * cfg.mc.n) * cfg.p / cfg.mc.n;
        j["cdf_grid"] = grid;
        j["cdf"] = cdf;
        write_text_file(dir / "simulate_summary.json", j.dump(2) + "\n");
    });
}

int cmd_compare(const ExperimentConfig& cfg, const std::string& out_dir, int jobs) {
    return guarded(cfg, out_dir, jobs, [&](const fs::path& dir) {
        const WeightMeasure m = cfg.measure.build();
        CurveRun r = run_density(cfg);
        const std::vector<double> pred = predicted_cdf(r.curve);

        SimResults sim = run_simulation(cfg, m);
        const std::vector<double> emp = smoothed_cdf(sim.pooled_eigenvalues, r.grid,
                                                     cfg.epsilon);

        double mean_zero = 0.0, m2_mc = 0.0;
        for (const auto& ps : sim.per_seed) {
            mean_zero += ps.zero_frac;
            m2_mc += ps.sum_sq_eigen / cfg.mc.n;
        }
        mean_zero /= cfg.mc.seeds;
        m2_mc /= cfg.mc.seeds;
        r.curve.atom_at_zero_hint = mean_zero;

        std::ofstream csv(dir / "compare.csv", std::ios::binary);
        char buf[160];
        std::snprintf(buf, sizeof buf, "# config=%s\n", hex_hash(cfg.hash()).c_str());
        csv << buf << "lambda,empirical_cdf,predicted_cdf,gap\n";
        for (std::size_t i = 0; i < r.grid.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", r.grid[i], emp[i],
                          pred[i], emp[i] - pred[i]);
            csv << buf;
        }

        const double ks = ks_distance(emp, pred);
        const double m2_law = 2.0 * cfg.alpha * (1.0 - cfg.alpha) * cfg.p * m.moment(2);
        json j;
        j["config_hash"] = hex_hash(cfg.hash());
        j["ks_distance"] = ks;
        j["second_moment_mc"] = m2_mc;
        j["second_moment_law"] = m2_law;
        j["moment_ratio"] = m2_mc / m2_law;
        j["predicted_mass_in_window"] = density_moment(r.curve, 0);
        j["atom_at_zero_measured"] = mean_zero;
        j["partial"] = r.curve.partial;
        write_text_file(dir / "compare_verdict.json", j.dump(2) + "\n");
    });
}

int cmd_variance(const ExperimentConfig& cfg, const std::string& out_dir, int jobs) {
    return guarded(cfg, out_dir, jobs, [&](const fs::path& dir) {
        const WeightMeasure m = cfg.measure.build();
        const std::complex<double> w{0.0, 1.0};
        const std::vector<VarianceRow> rows = variance_experiment(
            m, cfg.p, cfg.alpha, w, cfg.mc.n_list, cfg.mc.trials, cfg.mc.base_seed);

        std::ofstream csv(dir / "variance.csv", std::ios::binary);
        char buf[128];
        std::snprintf(buf, sizeof buf, "# config=%s\n", hex_hash(cfg.hash()).c_str());
        csv << buf << "n,variance,trials\n";
        for (const auto& row : rows) {
            std::snprintf(buf, sizeof buf, "%d,%.17g,%d\n", row.n, row.variance, row.trials);
            csv << buf;
        }

        // least-squares slope of log(variance) against log(n)
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (const auto& row : rows) {
            const double x = std::log(static_cast<double>(row.n));
            const double y = std::log(std::max(row.variance, 1e-300));
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        const double k = static_cast<double>(rows.size());
        const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);

        json j;
        j["config_hash"] = hex_hash(cfg.hash());
        j["w"] = {w.real(), w.imag()};
        j["slope"] = slope;
        json table = json::array();
        for (const auto& row : rows)
            table.push_back({{"n", row.n}, {"variance", row.variance}, {"trials", row.trials}});
        j["rows"] = table;
        write_text_file(dir / "variance_summary.json", j.dump(2) + "\n");
    });
}

}  // namespace bipspec
