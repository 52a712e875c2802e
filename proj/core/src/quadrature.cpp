#include "bipspec/quadrature.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace bipspec {

Quadrature gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    Quadrature q;
    q.nodes.resize(n);
    q.weights.resize(n);
    // Newton iteration on the Legendre recurrence; nodes are symmetric.
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double x_prev, dp = 0.0;
        int guard = 0;
        do {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * x * p2 - j * p3) / (j + 1.0);
            }
            dp = n * (x * p1 - p2) / (x * x - 1.0);
            x_prev = x;
            x = x_prev - p1 / dp;
        } while (std::fabs(x - x_prev) > 1e-15 && ++guard < 100);
        q.nodes[i] = -x;
        q.nodes[n - 1 - i] = x;
        q.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        q.weights[n - 1 - i] = q.weights[i];
    }
    return q;
}

Quadrature gauss_legendre(int n, double a, double b) {
    if (!(a < b)) throw std::invalid_argument("gauss_legendre: need a < b");
    Quadrature q = gauss_legendre(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < n; ++i) {
        q.nodes[i] = mid + half * q.nodes[i];
        q.weights[i] *= half;
    }
    return q;
}

Quadrature gauss_hermite(int n) {
    if (n < 1) throw std::invalid_argument("gauss_hermite: n must be >= 1");
    // Golub-Welsch on the Jacobi matrix: off-diagonals sqrt(k/2).
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        double b = std::sqrt(0.5 * k);
        jacobi(k, k - 1) = b;
        jacobi(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("gauss_hermite: eigensolver failed");
    Quadrature q;
    q.nodes.resize(n);
    q.weights.resize(n);
    const double mu0 = std::sqrt(M_PI);  // Int exp(-x^2) dx
    for (int i = 0; i < n; ++i) {
        q.nodes[i] = es.eigenvalues()[i];
        double v0 = es.eigenvectors()(0, i);
        q.weights[i] = mu0 * v0 * v0;
    }
    return q;
}

}  // namespace bipspec
