#pragma once

// Discrete Doppler action on a scaled Hermite-Gauss spectral basis:
// the reshuffling matrix U_mu and its closed-form mu-derivative D at mu = 1.
// Sign convention: the global mirror phase is dropped, so U_1 = +I.

#include <Eigen/Dense>

#include <cmath>

#include "qdr/errors.hpp"
#include "qdr/hermite.hpp"

namespace qdr {

struct HermiteGaussBasis {
    double omega0;  // center angular frequency (rad/s)
    double s;       // time scale (s); basis functions sqrt(s) phi_m(s (w - omega0))
    int max_order;  // highest retained order M

    double omega0_s() const { return omega0 * s; }
    bool narrowband() const { return omega0_s() >= 10.0; }
};

// Default quadrature order for the overlap integrals.
inline int doppler_default_quad_order(int max_order) {
    return std::max(64, 4 * (max_order + 1));
}

// U_{kj} = sqrt(mu) \int phi_k(y) phi_j(mu y + (mu-1) w0 s) dy, evaluated by
// Gauss-Hermite quadrature after completing the square of the combined
// Gaussian factor.  The Hermite polynomial parts are evaluated with the
// quadrature Gaussian folded in, so every intermediate stays representable
// even at large order.
inline Eigen::MatrixXd doppler_unitary_matrix(const HermiteGaussBasis& basis, double mu,
                                              int quad_order = 0) {
    if (mu <= 0.0) throw invalid_argument("doppler_unitary_matrix: mu must be positive");
    const int m = basis.max_order;
    if (quad_order <= 0) quad_order = doppler_default_quad_order(m);
    const GaussHermiteRule rule = gauss_hermite(quad_order);

    const double delta = (mu - 1.0) * basis.omega0_s();
    const double a = 1.0 + mu * mu;
    const double b = -mu * delta / a;
    const double c = delta * delta / (2.0 * a);
    const double beta = std::sqrt(2.0 / a);

    const Eigen::VectorXd y = (b + (beta * rule.nodes.array())).matrix();
    const Eigen::VectorXd u = (mu * y.array() + delta).matrix();
    const Eigen::VectorXd half_gauss = (-0.5 * rule.nodes.array().square()).exp().matrix();

    const Eigen::MatrixXd pk = hermite_rows(m, y, half_gauss);
    const Eigen::MatrixXd qj = hermite_rows(m, u, half_gauss);
    return std::sqrt(mu) * beta * std::exp(-c) *
           (pk * rule.modified_weights.asDiagonal() * qj.transpose());
}

// Closed-form generator D_{kj} = dU_{kj}/dmu at mu = 1.  Nonzero only for
// |k - j| in {1, 2}; built two orders larger and cropped so the retained
// block is free of edge effects.
inline Eigen::MatrixXd doppler_generator(const HermiteGaussBasis& basis) {
    const int m = basis.max_order;
    const int mp = m + 2;
    const double w0s = basis.omega0_s();
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(mp + 1, mp + 1);
    for (int j = 0; j <= mp; ++j) {
        if (j - 1 >= 0) d(j - 1, j) += w0s * std::sqrt(j / 2.0);
        if (j + 1 <= mp) d(j + 1, j) -= w0s * std::sqrt((j + 1) / 2.0);
        if (j - 2 >= 0) d(j - 2, j) += std::sqrt(static_cast<double>(j) * (j - 1)) / 2.0;
        if (j + 2 <= mp) d(j + 2, j) -= std::sqrt(static_cast<double>(j + 1) * (j + 2)) / 2.0;
    }
    return d.topLeftCorner(m + 1, m + 1);
}

}  // namespace qdr
