#pragma once

// Normalized Hermite functions phi_n(y) = (2^n n! sqrt(pi))^{-1/2} H_n(y) e^{-y^2/2}
// via the stable three-term recurrence, plus Gauss-Hermite nodes and weights
// from the Golub-Welsch Jacobi matrix.  Weights are produced in "modified"
// form  w~_i = w_i e^{t_i^2}  through the Christoffel function, which stays
// O(1) and avoids the catastrophic under/overflow of the raw weights at
// large order.

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "qdr/errors.hpp"

namespace qdr {

// phi_0..phi_nmax evaluated at a single point.
inline std::vector<double> hermite_gauss_all(int nmax, double y) {
    std::vector<double> out(static_cast<std::size_t>(nmax) + 1);
    out[0] = std::pow(M_PI, -0.25) * std::exp(-0.5 * y * y);
    if (nmax >= 1) out[1] = std::sqrt(2.0) * y * out[0];
    for (int n = 1; n < nmax; ++n)
        out[static_cast<std::size_t>(n) + 1] =
            std::sqrt(2.0 / (n + 1)) * y * out[static_cast<std::size_t>(n)] -
            std::sqrt(n / (n + 1.0)) * out[static_cast<std::size_t>(n) - 1];
    return out;
}

inline double hermite_gauss_eval(int n, double y) {
    if (n < 0) throw invalid_argument("hermite_gauss_eval: negative order");
    return hermite_gauss_all(n, y).back();
}

// d phi_n / dy from the exact ladder identity
//   phi_n'(y) = sqrt(n/2) phi_{n-1}(y) - sqrt((n+1)/2) phi_{n+1}(y).
inline double hermite_gauss_deriv(int n, double y) {
    if (n < 0) throw invalid_argument("hermite_gauss_deriv: negative order");
    auto phi = hermite_gauss_all(n + 1, y);
    double d = -std::sqrt((n + 1) / 2.0) * phi[static_cast<std::size_t>(n) + 1];
    if (n >= 1) d += std::sqrt(n / 2.0) * phi[static_cast<std::size_t>(n) - 1];
    return d;
}

// Rows phi_k(y_i) for k = 0..nmax over a set of points; `pref` is an optional
// per-point prefactor folded into the recurrence seed (used to attach
// exponential factors without ever forming them separately).
inline Eigen::MatrixXd hermite_rows(int nmax, const Eigen::VectorXd& y, const Eigen::VectorXd& pref) {
    Eigen::MatrixXd out(nmax + 1, y.size());
    out.row(0) = std::pow(M_PI, -0.25) * pref.transpose();
    if (nmax >= 1) out.row(1) = std::sqrt(2.0) * y.transpose().cwiseProduct(out.row(0));
    for (int n = 1; n < nmax; ++n)
        out.row(n + 1) = std::sqrt(2.0 / (n + 1)) * y.transpose().cwiseProduct(out.row(n)) -
                         std::sqrt(n / (n + 1.0)) * out.row(n - 1);
    return out;
}

struct GaussHermiteRule {
    Eigen::VectorXd nodes;             // t_i, ascending
    Eigen::VectorXd modified_weights;  // w_i e^{t_i^2}, all O(1)
};

// Golub-Welsch: nodes are eigenvalues of the symmetric tridiagonal Jacobi
// matrix with off-diagonals sqrt(k/2); the modified weights follow from the
// Christoffel function  w_i e^{t_i^2} = 1 / sum_k phi_k(t_i)^2.
inline GaussHermiteRule gauss_hermite(int order) {
    if (order < 1) throw invalid_argument("gauss_hermite: order must be >= 1");
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(order, order);
    for (int k = 1; k < order; ++k) {
        j(k - 1, k) = std::sqrt(k / 2.0);
        j(k, k - 1) = j(k - 1, k);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j, Eigen::EigenvaluesOnly);
    GaussHermiteRule rule;
    rule.nodes = es.eigenvalues();
    const Eigen::VectorXd gauss =
        (-0.5 * rule.nodes.array().square()).exp().matrix();
    const Eigen::MatrixXd phi = hermite_rows(order - 1, rule.nodes, gauss);
    rule.modified_weights = phi.array().square().colwise().sum().inverse().matrix().transpose();
    return rule;
}

}  // namespace qdr
