#pragma once

#include <vector>

namespace bipspec {

/// Nodes and weights of a quadrature rule. The interval (or weight
/// function) is fixed by the factory that produced the rule.
struct Quadrature {
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const { return nodes.size(); }
};

/// Gauss-Legendre rule on [-1, 1].
Quadrature gauss_legendre(int n);

/// Gauss-Legendre rule mapped to [a, b].
Quadrature gauss_legendre(int n, double a, double b);

/// Gauss-Hermite rule: integrates f against exp(-x^2) on the real line.
Quadrature gauss_hermite(int n);

}  // namespace bipspec
