#pragma once

// Independent validation paths that share no algorithm with the quantities
// they check: a fidelity-based finite-difference QFI, a quadrature
// finite-difference of the Doppler reshuffling matrix, and a numerical
// Schmidt decomposition of the discretized joint spectral amplitude.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "qdr/doppler.hpp"
#include "qdr/errors.hpp"
#include "qdr/protocols.hpp"
#include "qdr/schmidt.hpp"
#include "qdr/symplectic.hpp"

namespace qdr {

struct FdConfig {
    double h = 0.02;         // parameter step
    bool richardson = true;  // extrapolate with steps h and h/2
    double min_nu = 1.0 + 1e-6;  // mixedness guard on every probed state
    double ladder_tol = 0.1;     // max relative spread of the step ladder
};

struct FdResult {
    double value = 0.0;
    double error_estimate = 0.0;  // from the extrapolation ladder
};

namespace detail {

inline double qfi_fd_single(const std::function<GaussianState(double)>& state_at, double mu0,
                            double h, double min_nu) {
    const GaussianState lo = state_at(mu0 - h);
    const GaussianState hi = state_at(mu0 + h);
    for (const GaussianState* st : {&lo, &hi}) {
        const auto nu = symplectic_eigenvalues(st->cov);
        if (nu.empty() || nu.back() < min_nu)
            throw oracle_failure("qfi_finite_difference: state too close to the pure boundary");
    }
    const double f = gaussian_fidelity(lo, hi);
    return 8.0 * (1.0 - f) / (4.0 * h * h);
}

}  // namespace detail

// QFI from the Bures metric:  J = 8 (1 - F(rho_{m-h}, rho_{m+h})) / (2h)^2,
// optionally Richardson-extrapolated, using only the fidelity primitive.
inline FdResult qfi_finite_difference(const std::function<GaussianState(double)>& state_at,
                                      double mu0, const FdConfig& cfg = {}) {
    if (cfg.h <= 0.0) throw invalid_argument("qfi_finite_difference: h must be positive");
    const double j_h = detail::qfi_fd_single(state_at, mu0, cfg.h, cfg.min_nu);
    if (!cfg.richardson) return {j_h, 0.0};
    const double j_h2 = detail::qfi_fd_single(state_at, mu0, cfg.h / 2.0, cfg.min_nu);
    FdResult res{(4.0 * j_h2 - j_h) / 3.0, std::abs(j_h2 - j_h) / 3.0};
    if (res.error_estimate > cfg.ladder_tol * std::abs(res.value))
        throw oracle_failure("qfi_finite_difference: extrapolation ladder did not converge");
    return res;
}

// Single matrix element of the Doppler generator by direct quadrature of
//   G_kj = \int phi_k(x) [ phi_j(x)/2 + (w0 s + x) phi_j'(x) ] dx
// in the scaled spectral variable, with the analytic Hermite-function
// derivative.  Independent of the closed form it validates.
inline double generator_by_quadrature(const HermiteGaussBasis& basis, int k, int j,
                                      int quad_order = 0) {
    if (k < 0 || j < 0 || k > basis.max_order || j > basis.max_order)
        throw invalid_argument("generator_by_quadrature: order out of range");
    if (quad_order <= 0) quad_order = 4 * (std::max(k, j) + 2);
    const GaussHermiteRule rule = gauss_hermite(quad_order);
    const double w0s = basis.omega0_s();
    double acc = 0.0;
    // The phi factors carry e^{-x^2} between them, cancelling the e^{+x^2}
    // in the modified weights, so every term stays O(1).
    for (int i = 0; i < quad_order; ++i) {
        const double x = rule.nodes(i);
        acc += rule.modified_weights(i) * hermite_gauss_eval(k, x) *
               (0.5 * hermite_gauss_eval(j, x) + (w0s + x) * hermite_gauss_deriv(j, x));
    }
    return acc;
}

struct SchmidtSvdResult {
    std::vector<double> r;  // normalized Schmidt weights, descending magnitudes
    double K = 0.0;         // Schmidt number estimate
};

// Numerical Schmidt decomposition: sample the JSA on an n x n grid of
// signal/idler frequencies centered on w_p/2 and take singular values of the
// resulting matrix.  `span` is the half-width of the grid in rad/s; 0 picks
// twelve marginal standard deviations.
inline SchmidtSvdResult schmidt_by_svd(double sigma_p, double eps, double omega_p, int n = 512,
                                       double span = 0.0) {
    if (n < 256) throw invalid_argument("schmidt_by_svd: grid_n must be >= 256");
    const double marginal_sd = std::sqrt((sigma_p * sigma_p + eps * eps) / 8.0);
    const double l = (span > 0.0) ? span : 12.0 * marginal_sd;
    const double step = 2.0 * l / (n - 1);
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i) {
        const double ws = omega_p / 2.0 - l + i * step;
        for (int j = 0; j < n; ++j) {
            const double wi = omega_p / 2.0 - l + j * step;
            a(i, j) = jsa_eval(sigma_p, eps, omega_p, ws, wi);
        }
    }
    double boundary = 0.0;
    for (int i = 0; i < n; ++i)
        boundary += (a(i, 0) * a(i, 0) + a(i, n - 1) * a(i, n - 1) + a(0, i) * a(0, i) +
                     a(n - 1, i) * a(n - 1, i)) *
                    step * step;
    if (boundary > 1e-12) throw invalid_grid("schmidt_by_svd: grid span leaves boundary mass");
    Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
    Eigen::VectorXd s = svd.singularValues() * step;
    const double norm = s.norm();
    if (norm <= 0.0) throw oracle_failure("schmidt_by_svd: vanishing spectrum");
    s /= norm;
    SchmidtSvdResult out;
    double sum4 = 0.0;
    for (int i = 0; i < s.size(); ++i) {
        if (s(i) < 1e-12) break;
        out.r.push_back(s(i));
        sum4 += std::pow(s(i), 4);
    }
    out.K = 1.0 / sum4;
    return out;
}

// Received QDR state at a general Doppler factor mu, built for the
// finite-difference oracle.  The thermal background is exactly
// (2 N_B + 1) I by construction: only the compact deviation of the
// transmitted state from vacuum is pushed through the (truncated)
// reshuffling matrix, so basis truncation cannot contaminate the
// mu-independent background.
inline GaussianState qdr_received_at_mu(const QdrProbe& probe, const ScenarioParams& scen,
                                        double mu, int n_signal_modes, int quad_order = 0) {
    scen.validate();
    const int pairs = static_cast<int>(probe.ns_m.size());
    if (n_signal_modes < pairs + qdr_buffer_modes)
        throw invalid_argument("qdr_received_at_mu: signal space smaller than the probe");
    const int n = 2 * (n_signal_modes + pairs);

    // Deviation of the transmitted covariance from the identity.
    Matrix dev = Matrix::Zero(n, n);
    for (int m = 0; m < pairs; ++m) {
        const double nm = probe.ns_m[static_cast<std::size_t>(m)];
        const double s = 2.0 * nm;
        const double c = 2.0 * std::sqrt(nm * (nm + 1.0));
        const int si = 2 * m;
        const int ii = 2 * (n_signal_modes + m);
        dev(si, si) = dev(si + 1, si + 1) = s;
        dev(ii, ii) = dev(ii + 1, ii + 1) = s;
        dev(si, ii) = dev(ii, si) = c;
        dev(si + 1, ii + 1) = dev(ii + 1, si + 1) = -c;
    }

    const Eigen::MatrixXd u = doppler_unitary_matrix(
        HermiteGaussBasis{scen.omega_c, probe.spectrum.scale(), n_signal_modes - 1}, mu,
        quad_order);
    Matrix x = Matrix::Identity(n, n);
    const double se = std::sqrt(scen.eta);
    for (int k = 0; k < n_signal_modes; ++k)
        for (int j = 0; j < n_signal_modes; ++j) {
            x(2 * k, 2 * j) = se * u(k, j);
            x(2 * k + 1, 2 * j + 1) = se * u(k, j);
        }
    for (int i = 2 * n_signal_modes; i < n; ++i) x(i, i) = 1.0;

    Matrix cov = x * dev * x.transpose();
    for (int i = 0; i < 2 * n_signal_modes; ++i) cov(i, i) += 2.0 * scen.nb + 1.0;
    for (int i = 2 * n_signal_modes; i < n; ++i) cov(i, i) += 1.0;
    cov = 0.5 * (cov + cov.transpose());
    return GaussianState{ModeLayout::signal_idler(n_signal_modes, pairs), Vector::Zero(n),
                         std::move(cov)};
}

}  // namespace qdr
