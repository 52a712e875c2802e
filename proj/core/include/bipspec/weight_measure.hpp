#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace bipspec {

/// How a measure was obtained. Continuous laws are represented by a
/// quadrature rule at construction time and cannot be sampled.
enum class MeasureKind { ExactDiscrete, QuadratureOfContinuous };

struct Atom {
    double value;  // signed edge weight
    double mass;   // probability weight, >= 0
};

/// Discrete (or quadrature-discretized) distribution of edge weights.
///
/// Invariants: at least one atom, masses nonnegative and summing to 1,
/// and a strictly positive second absolute moment. Atoms are kept signed
/// for sampling; all analytic quantities consume |value| only.
/// Immutable after construction and safe to share across threads.
class WeightMeasure {
public:
    /// Normalizes masses to sum to 1 and merges atoms whose values agree
    /// within 1e-12. Throws std::invalid_argument on an empty atom list,
    /// all-zero masses, a negative mass, or a zero second moment.
    static WeightMeasure from_atoms(std::vector<Atom> atoms,
                                    MeasureKind kind = MeasureKind::ExactDiscrete);

    static WeightMeasure point_mass(double value);
    /// Atoms at +value and -value with mass 1/2 each (value > 0).
    static WeightMeasure symmetric_two_point(double value);
    /// Centered Gaussian with standard deviation `stddev`, reduced to a
    /// Gauss-Hermite rule with `nodes` points.
    static WeightMeasure gaussian(double stddev, int nodes = 64);
    /// Uniform law on [lo, hi], reduced to a Gauss-Legendre rule.
    static WeightMeasure uniform(double lo, double hi, int nodes = 64);

    /// k-th absolute moment X_k = sum_i mass_i |value_i|^k, for 0 <= k <= 8.
    double moment(int k) const;

    /// Truncation at threshold T > 0: values >= T are replaced by T,
    /// values below T (including negative ones) are unchanged.
    WeightMeasure truncated(double threshold) const;

    /// sum_i mass_i * |value_i| * phi(|value_i|). Throws std::runtime_error
    /// if phi evaluates to a non-finite value at some atom.
    std::complex<double> integrate_abs(
        const std::function<std::complex<double>(double)>& phi) const;

    /// `count` i.i.d. draws, deterministic under `seed`. Only exact-discrete
    /// measures can be sampled; quadrature representations are refused
    /// (std::logic_error).
    std::vector<double> sample(std::uint64_t seed, std::size_t count) const;

    /// Single draw from an already-seeded engine (exact-discrete only).
    double draw(std::mt19937_64& rng) const;

    const std::vector<Atom>& atoms() const { return atoms_; }
    MeasureKind kind() const { return kind_; }
    double max_abs_value() const;

private:
    WeightMeasure() = default;
    std::vector<Atom> atoms_;
    std::vector<double> cumulative_;  // for inverse-CDF sampling
    MeasureKind kind_ = MeasureKind::ExactDiscrete;
};

}  // namespace bipspec
