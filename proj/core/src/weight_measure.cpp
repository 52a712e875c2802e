#include "bipspec/weight_measure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bipspec/quadrature.hpp"

namespace bipspec {

namespace {
constexpr double kMergeTol = 1e-12;

double canonical_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}
}  // namespace

WeightMeasure WeightMeasure::from_atoms(std::vector<Atom> atoms, MeasureKind kind) {
    if (atoms.empty()) throw std::invalid_argument("WeightMeasure: empty atom list");
    double total = 0.0;
    for (const Atom& at : atoms) {
        if (!std::isfinite(at.value) || !std::isfinite(at.mass))
            throw std::invalid_argument("WeightMeasure: non-finite atom");
        if (at.mass < 0.0) throw std::invalid_argument("WeightMeasure: negative mass");
        total += at.mass;
    }
    if (total <= 0.0) throw std::invalid_argument("WeightMeasure: all masses are zero");

    std::sort(atoms.begin(), atoms.end(),
              [](const Atom& a, const Atom& b) { return a.value < b.value; });
    std::vector<Atom> merged;
    for (const Atom& at : atoms) {
        if (at.mass == 0.0) continue;
        if (!merged.empty() && std::fabs(at.value - merged.back().value) <= kMergeTol)
            merged.back().mass += at.mass;
        else
            merged.push_back(at);
    }
    if (merged.empty()) throw std::invalid_argument("WeightMeasure: all masses are zero");
    for (Atom& at : merged) at.mass /= total;

    WeightMeasure m;
    m.atoms_ = std::move(merged);
    m.kind_ = kind;
    m.cumulative_.resize(m.atoms_.size());
    double run = 0.0;
    for (std::size_t i = 0; i < m.atoms_.size(); ++i) {
        run += m.atoms_[i].mass;
        m.cumulative_[i] = run;
    }
    m.cumulative_.back() = 1.0;

    if (!(m.moment(2) > 0.0))
        throw std::invalid_argument("WeightMeasure: second moment must be positive");
    return m;
}

WeightMeasure WeightMeasure::point_mass(double value) {
    return from_atoms({{value, 1.0}});
}

WeightMeasure WeightMeasure::symmetric_two_point(double value) {
    if (!(value > 0.0))
        throw std::invalid_argument("symmetric_two_point: value must be > 0");
    return from_atoms({{-value, 0.5}, {value, 0.5}});
}

WeightMeasure WeightMeasure::gaussian(double stddev, int nodes) {
    if (!(stddev > 0.0)) throw std::invalid_argument("gaussian: stddev must be > 0");
    Quadrature gh = gauss_hermite(nodes);
    std::vector<Atom> atoms(gh.size());
    const double scale = std::sqrt(2.0) * stddev, norm = 1.0 / std::sqrt(M_PI);
    for (std::size_t i = 0; i < gh.size(); ++i)
        atoms[i] = {scale * gh.nodes[i], norm * gh.weights[i]};
    return from_atoms(std::move(atoms), MeasureKind::QuadratureOfContinuous);
}

WeightMeasure WeightMeasure::uniform(double lo, double hi, int nodes) {
    if (!(lo < hi)) throw std::invalid_argument("uniform: need lo < hi");
    Quadrature gl = gauss_legendre(nodes, lo, hi);
    std::vector<Atom> atoms(gl.size());
    const double density = 1.0 / (hi - lo);
    for (std::size_t i = 0; i < gl.size(); ++i)
        atoms[i] = {gl.nodes[i], density * gl.weights[i]};
    return from_atoms(std::move(atoms), MeasureKind::QuadratureOfContinuous);
}

double WeightMeasure::moment(int k) const {
    if (k < 0 || k > 8)
        throw std::invalid_argument("WeightMeasure::moment: k must be in [0, 8]");
    double s = 0.0;
    for (const Atom& at : atoms_) s += at.mass * std::pow(std::fabs(at.value), k);
    return s;
}

WeightMeasure WeightMeasure::truncated(double threshold) const {
    if (!(threshold > 0.0))
        throw std::invalid_argument("WeightMeasure::truncated: threshold must be > 0");
    std::vector<Atom> atoms = atoms_;
    for (Atom& at : atoms)
        if (at.value >= threshold) at.value = threshold;
    return from_atoms(std::move(atoms), kind_);
}

std::complex<double> WeightMeasure::integrate_abs(
    const std::function<std::complex<double>(double)>& phi) const {
    std::complex<double> s{0.0, 0.0};
    for (const Atom& at : atoms_) {
        const double av = std::fabs(at.value);
        const std::complex<double> v = phi(av);
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw std::runtime_error("integrate_abs: non-finite integrand value");
        s += at.mass * av * v;
    }
    return s;
}

double WeightMeasure::draw(std::mt19937_64& rng) const {
    if (kind_ != MeasureKind::ExactDiscrete)
        throw std::logic_error("WeightMeasure: cannot sample a quadrature representation");
    const double u = canonical_uniform(rng);
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    const std::size_t idx =
        std::min<std::size_t>(it - cumulative_.begin(), atoms_.size() - 1);
    return atoms_[idx].value;
}

std::vector<double> WeightMeasure::sample(std::uint64_t seed, std::size_t count) const {
    if (kind_ != MeasureKind::ExactDiscrete)
        throw std::logic_error("WeightMeasure: cannot sample a quadrature representation");
    std::mt19937_64 rng(seed);
    std::vector<double> out(count);
    for (double& x : out) x = draw(rng);
    return out;
}

double WeightMeasure::max_abs_value() const {
    double m = 0.0;
    for (const Atom& at : atoms_) m = std::max(m, std::fabs(at.value));
    return m;
}

}  // namespace bipspec
