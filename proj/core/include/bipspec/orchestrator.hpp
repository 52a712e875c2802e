#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "bipspec/spectral.hpp"
#include "bipspec/weight_measure.hpp"

namespace bipspec {

/// Raised on malformed or out-of-range configuration input; the CLI maps
/// it to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Declarative measure description as it appears in config files.
struct MeasureSpec {
    enum class Type { Atoms, PointMass, TwoPoint, Gaussian, Uniform };
    Type type = Type::PointMass;
    std::vector<Atom> atoms;  // Atoms
    double value = 1.0;       // PointMass / TwoPoint
    double stddev = 1.0;      // Gaussian
    double lo = -1.0;         // Uniform
    double hi = 1.0;
    int nodes = 64;           // quadrature nodes for continuous laws
    double truncation = 0.0;  // > 0: apply weight truncation at this threshold

    WeightMeasure build() const;
};

/// Everything one experiment needs; round-trips through JSON unchanged.
struct ExperimentConfig {
    MeasureSpec measure;
    double p = 2.0;
    double alpha = 0.5;

    double lambda_max = 6.0;
    int lambda_count = 481;
    double epsilon = 0.05;
    /// Epsilons for moment extrapolation (descending).
    std::vector<double> epsilon_schedule{0.2, 0.1, 0.05};

    SolverConfig solver;

    struct Mc {
        std::vector<int> n_list{250, 500, 1000, 2000};
        int trials = 200;
        int seeds = 20;
        int n = 2000;
        std::uint64_t base_seed = 20260801;
    } mc;

    std::string output_dir = "out";

    static ExperimentConfig from_json_text(const std::string& text);
    static ExperimentConfig load(const std::string& path);
    std::string to_json_text() const;

    /// FNV-1a hash of the canonical serialized form; embedded in every
    /// output file for provenance.
    std::uint64_t hash() const;

    /// Throws ConfigError when any field violates a module precondition.
    void validate() const;
};

/// Command entry points shared by the CLI and the tests. Each writes its
/// CSV/JSON outputs under `out_dir` (created if needed) and returns a
/// process exit code: 0 success (possibly partial, flagged in the JSON),
/// 2 config error, 3 internal numerical failure. `jobs` sizes the worker
/// pool (1 = fully sequential baseline; results do not depend on it).
int cmd_solve(const ExperimentConfig& cfg, const std::string& out_dir, int jobs = 1);
int cmd_simulate(const ExperimentConfig& cfg, const std::string& out_dir, int jobs = 1);
int cmd_compare(const ExperimentConfig& cfg, const std::string& out_dir, int jobs = 1);
int cmd_variance(const ExperimentConfig& cfg, const std::string& out_dir, int jobs = 1);

/// Applies a worker-pool size to the process (OpenMP threads).
void set_parallelism(int jobs);

}  // namespace bipspec
