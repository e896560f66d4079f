#pragma once

// Classical (coherent, CDR) and quantum (SPDC, QDR) Doppler-radar protocols:
// probe construction, the thermal-loss Doppler channel, and the Fisher
// information of both strategies, including the matched comparison at equal
// signal energy, pulse duration and center frequency.

#include <Eigen/Dense>

#include <cmath>
#include <iostream>
#include <utility>
#include <vector>

#include "qdr/doppler.hpp"
#include "qdr/errors.hpp"
#include "qdr/hermite.hpp"
#include "qdr/schmidt.hpp"
#include "qdr/symplectic.hpp"

namespace qdr {

inline constexpr double c_light = 299792458.0;  // m/s

struct ScenarioParams {
    double v = 100.0;          // target radial speed (m/s), approaching
    double omega_c = 0.0;      // signal center angular frequency (rad/s)
    double eta = 1.0;          // transmissivity
    double nb = 0.0;           // mean thermal photons per mode

    double mu() const { return (c_light - v) / (c_light + v); }

    void validate() const {
        if (!(eta > 0.0 && eta <= 1.0)) throw invalid_argument("ScenarioParams: eta must lie in (0,1]");
        if (nb < 0.0) throw invalid_argument("ScenarioParams: N_B must be >= 0");
        if (omega_c <= 0.0) throw invalid_argument("ScenarioParams: omega_c must be positive");
        if (mu() <= 0.0 || mu() > 1.0) throw invalid_argument("ScenarioParams: mu out of (0,1]");
    }
};

// Coherent-state probe in a single Gaussian spectral mode
//   f(w) = (pi Delta^2)^{-1/4} exp(-(w - w_c)^2 / (2 Delta^2)),
// whose temporal intensity profile has standard deviation 1/(sqrt(2) Delta).
struct CdrProbe {
    double alpha;    // real displacement, N_S = alpha^2
    double omega_c;  // center angular frequency (rad/s)
    double delta;    // spectral width (rad/s)

    double ns() const { return alpha * alpha; }
    double dt() const { return 1.0 / (std::sqrt(2.0) * delta); }

    static CdrProbe from_duration(double alpha, double omega_c, double dt) {
        return {alpha, omega_c, 1.0 / (std::sqrt(2.0) * dt)};
    }
};

// Mode-shape integral N = \int (f/2 + w f')^2 dw for the Gaussian mode,
// evaluated by Gauss-Hermite quadrature (exact: the integrand is a
// polynomial times the quadrature weight).  Analytically 1/2 + w_c^2 dT^2.
inline double cdr_mode_norm(const CdrProbe& probe, int quad_order = 40) {
    const GaussHermiteRule rule = gauss_hermite(quad_order);
    const double g = probe.omega_c / probe.delta;
    double acc = 0.0;
    for (int i = 0; i < quad_order; ++i) {
        const double x = rule.nodes(i);
        const double w = rule.modified_weights(i) * std::exp(-x * x);
        const double val = 0.5 - g * x - x * x;
        acc += w * val * val;
    }
    return acc / std::sqrt(M_PI);
}

// Closed-form classical QFI, J_c = 4 eta N_S N / (mu^2 (2 N_B + 1)).
inline double jc_exact(const CdrProbe& probe, const ScenarioParams& scen) {
    scen.validate();
    const double mu = scen.mu();
    return 4.0 * scen.eta * probe.ns() * cdr_mode_norm(probe) / (mu * mu * (2.0 * scen.nb + 1.0));
}

// Narrowband approximation J_c ~ 4 w_c^2 eta N_S dT^2 / (mu^2 (2 N_B + 1)).
inline double jc_approx(double ns, double dt, const ScenarioParams& scen) {
    scen.validate();
    if (scen.omega_c * dt < 10.0)
        std::cerr << "warning: jc_approx outside the narrowband regime (w_c*dT = "
                  << scen.omega_c * dt << " < 10)\n";
    const double mu = scen.mu();
    return 4.0 * scen.omega_c * scen.omega_c * scen.eta * ns * dt * dt /
           (mu * mu * (2.0 * scen.nb + 1.0));
}

// Same quantity through the generic Gaussian machinery: a two-mode layout
// {f, normalized derivative mode}, received covariance (2N_B+1) I_4 and the
// transmitted-mean derivative (carrying the sqrt(eta) transmissivity).
inline double jc_via_gaussian_machinery(const CdrProbe& probe, const ScenarioParams& scen) {
    scen.validate();
    const double norm = cdr_mode_norm(probe);
    if (norm <= 0.0) throw invalid_argument("jc_via_gaussian_machinery: degenerate derivative mode");
    const double mu = scen.mu();
    const Matrix cov = (2.0 * scen.nb + 1.0) * Matrix::Identity(4, 4);
    Vector d_mean = Vector::Zero(4);
    d_mean(2) = std::sqrt(scen.eta) * std::sqrt(2.0 * norm) * probe.alpha;
    const double j1 = qfi_gaussian(Vector::Zero(4), cov, d_mean, Matrix::Zero(4, 4));
    return j1 / (mu * mu);
}

// SPDC probe: per-Schmidt-mode two-mode squeezed vacua with squeezing xi r_m.
struct QdrProbe {
    SchmidtSpectrum spectrum;
    double xi = 0.0;
    std::vector<double> ns_m;  // per-mode signal photons sinh^2(xi r_m)

    static QdrProbe make(const SchmidtSpectrum& spectrum, double xi) {
        if (xi <= 0.0) throw invalid_argument("QdrProbe: xi must be positive");
        QdrProbe p{spectrum, xi, {}};
        p.ns_m.reserve(spectrum.r.size());
        for (double r : spectrum.r) {
            const double sh = std::sinh(xi * r);
            p.ns_m.push_back(sh * sh);
        }
        return p;
    }

    double ns() const {
        double acc = 0.0;
        for (double n : ns_m) acc += n;
        return acc;
    }

    // Temporal intensity standard deviation.  Each Hermite-Gauss mode of the
    // basis contributes temporal variance s^2 (m + 1/2), weighted by its
    // photon share.
    double dt() const {
        const double s = spectrum.scale();
        double num = 0.0, den = 0.0;
        for (std::size_t m = 0; m < ns_m.size(); ++m) {
            num += (static_cast<double>(m) + 0.5) * ns_m[m];
            den += ns_m[m];
        }
        if (den <= 0.0) throw invalid_argument("QdrProbe::dt: empty probe");
        return s * std::sqrt(num / den);
    }
};

// Solve sinh^2-sum(xi) = target by bisection (monotone in xi).
inline double xi_for_signal_photons(const SchmidtSpectrum& spectrum, double target) {
    if (target <= 0.0) throw invalid_argument("xi_for_signal_photons: target must be positive");
    auto ns_of = [&](double xi) {
        double acc = 0.0;
        for (double r : spectrum.r) {
            const double sh = std::sinh(xi * r);
            acc += sh * sh;
        }
        return acc;
    };
    double lo = 0.0, hi = 1.0;
    while (ns_of(hi) < target) {
        hi *= 2.0;
        if (hi > 1e4) throw invalid_argument("xi_for_signal_photons: target unreachable");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (ns_of(mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

namespace detail {

// Covariance block of one received signal/idler pair: the standard
// quantum-illumination form with noise A on both signal quadratures.
inline Matrix qdr_pair_block(double n_m, double eta, double nb) {
    const double a = 2.0 * eta * n_m + 2.0 * nb + 1.0;
    const double s = 2.0 * n_m + 1.0;
    const double c = 2.0 * std::sqrt(n_m * (n_m + 1.0));
    Matrix b = Matrix::Zero(4, 4);
    b(0, 0) = b(1, 1) = a;
    b(2, 2) = b(3, 3) = s;
    b(0, 2) = b(2, 0) = std::sqrt(eta) * c;
    b(1, 3) = b(3, 1) = -std::sqrt(eta) * c;
    return b;
}

}  // namespace detail

// Number of thermally populated buffer signal modes appended beyond the
// Schmidt truncation.  Two suffice: the generator only couples |k-j| <= 2,
// so the covariance derivative vanishes identically beyond the buffer.
inline constexpr int qdr_buffer_modes = 2;

// Received Gaussian state of the QDR and the covariance derivative at mu = 1,
// on the canonical layout (signal modes first, then idlers).  Signal space
// has `qdr_buffer_modes` extra thermal modes with no idler partners.
inline std::pair<GaussianState, Matrix> build_qdr_received(const QdrProbe& probe,
                                                           const ScenarioParams& scen) {
    scen.validate();
    const int pairs = static_cast<int>(probe.ns_m.size());
    const int n_sig = pairs + qdr_buffer_modes;
    const int n = 2 * (n_sig + pairs);

    // Transmitted SPDC covariance, identity on the buffer modes.
    Matrix cov0 = Matrix::Identity(n, n);
    for (int m = 0; m < pairs; ++m) {
        const double nm = probe.ns_m[static_cast<std::size_t>(m)];
        const double s = 2.0 * nm + 1.0;
        const double c = 2.0 * std::sqrt(nm * (nm + 1.0));
        const int si = 2 * m;
        const int ii = 2 * (n_sig + m);
        cov0(si, si) = cov0(si + 1, si + 1) = s;
        cov0(ii, ii) = cov0(ii + 1, ii + 1) = s;
        cov0(si, ii) = cov0(ii, si) = c;
        cov0(si + 1, ii + 1) = cov0(ii + 1, si + 1) = -c;
    }

    // Thermal-loss channel on the signal block (X = sqrt(eta) I at mu = 1,
    // Y = (2 N_B + 1 - eta) I); idlers are stored ideally.
    Matrix x = Matrix::Identity(n, n);
    Matrix y = Matrix::Zero(n, n);
    for (int i = 0; i < 2 * n_sig; ++i) {
        x(i, i) = std::sqrt(scen.eta);
        y(i, i) = 2.0 * scen.nb + 1.0 - scen.eta;
    }
    GaussianState received{ModeLayout::signal_idler(n_sig, pairs), Vector::Zero(n),
                           x * cov0 * x.transpose() + y};

    // d sigma_r = (dS~) sigma_r + sigma_r (dS~)^T with the generator embedded
    // on the signal block (quadrature space) and zero elsewhere.
    const Eigen::MatrixXd d = doppler_generator(
        HermiteGaussBasis{scen.omega_c, probe.spectrum.scale(), n_sig - 1});
    Matrix st = Matrix::Zero(n, n);
    for (int k = 0; k < n_sig; ++k)
        for (int j = 0; j < n_sig; ++j) {
            st(2 * k, 2 * j) = d(k, j);
            st(2 * k + 1, 2 * j + 1) = d(k, j);
        }
    Matrix d_cov = st * received.cov + received.cov * st.transpose();
    d_cov = 0.5 * (d_cov + d_cov.transpose());
    return {std::move(received), std::move(d_cov)};
}

// QFI of the QDR.  The received state is block diagonal over Schmidt pairs
// and the covariance derivative only couples pairs with |m - n| in {1, 2},
// so the vectorized system decouples into independent blocks of at most
// 16 x 16 — exact, and linear instead of quadratic in the mode count.
inline double jq(const QdrProbe& probe, const ScenarioParams& scen) {
    scen.validate();
    const int pairs = static_cast<int>(probe.ns_m.size());
    const int total = pairs + qdr_buffer_modes;
    const double ns_total = probe.ns();
    const double floor = 1e-8 * (1.0 + ns_total);

    const Eigen::MatrixXd d = doppler_generator(
        HermiteGaussBasis{scen.omega_c, probe.spectrum.scale(), total - 1});

    // Per-mode covariance blocks: 4x4 for populated pairs, 2x2 thermal for
    // buffer modes and pairs below the photon floor.  A pair whose 4x4 block
    // sits on the pure-state boundary (weakly populated pairs at small loss
    // and background keep a near-vacuum idler) is also demoted to its signal
    // marginal: its information contribution is of the order of its photon
    // share, which the boundary condition bounds at the noise floor.
    std::vector<Matrix> blocks(static_cast<std::size_t>(total));
    std::vector<bool> populated(static_cast<std::size_t>(total), false);
    for (int m = 0; m < total; ++m) {
        const double nm = (m < pairs) ? probe.ns_m[static_cast<std::size_t>(m)] : 0.0;
        if (m < pairs && nm > floor) {
            Matrix block = detail::qdr_pair_block(nm, scen.eta, scen.nb);
            if (symplectic_eigenvalues(block).back() > 1.0 + 1e-9) {
                populated[static_cast<std::size_t>(m)] = true;
                blocks[static_cast<std::size_t>(m)] = std::move(block);
                continue;
            }
            // Demoting a significantly populated pair would discard real
            // signal-idler correlations; refuse instead of silently
            // computing with the wrong state.
            if (nm > 1e-6 * (1.0 + ns_total))
                throw pure_state_error("jq: received block on the pure-state boundary");
        }
        blocks[static_cast<std::size_t>(m)] =
            (2.0 * scen.eta * nm + 2.0 * scen.nb + 1.0) * Matrix::Identity(2, 2);
    }

    const double mu = scen.mu();
    double j = 0.0;
    for (int m = 0; m < total; ++m) {
        for (int nn = m + 1; nn <= std::min(m + 2, total - 1); ++nn) {
            if (d(m, nn) == 0.0) continue;
            const Matrix& sm = blocks[static_cast<std::size_t>(m)];
            const Matrix& sn = blocks[static_cast<std::size_t>(nn)];
            const int am = static_cast<int>(sm.rows());
            const int an = static_cast<int>(sn.rows());
            // d sigma block (m, nn):  D_mn (P_s sigma_n - sigma_m P_s) with
            // P_s selecting the signal quadratures of each pair block.
            Matrix ds = Matrix::Zero(am, an);
            ds.topRows(2) = sn.topRows(2);
            ds.leftCols(2) -= sm.leftCols(2);
            ds *= d(m, nn);

            // The vectorized system is singular only when the product of the
            // smallest symplectic eigenvalues reaches one (both blocks pure).
            const auto nu_m = symplectic_eigenvalues(sm);
            const auto nu_n = symplectic_eigenvalues(sn);
            if (nu_m.back() * nu_n.back() <= 1.0 + 1e-9)
                throw pure_state_error("jq: received block pair on the pure-state boundary");

            // Solve (sigma_n (x) sigma_m - Om_n (x) Om_m) vec(X) = vec(ds).
            const Matrix om_m = symplectic_form(am / 2);
            const Matrix om_n = symplectic_form(an / 2);
            Matrix k = Matrix::Zero(am * an, am * an);
            for (int c = 0; c < an; ++c)
                for (int r = 0; r < an; ++r) {
                    k.block(r * am, c * am, am, am) += sn(c, r) * sm;
                    k.block(r * am, c * am, am, am) += om_n(c, r) * om_m;
                }
            Eigen::Map<const Vector> bv(ds.data(), am * an);
            j += bv.dot(k.ldlt().solve(bv));
        }
    }
    return j / (mu * mu);
}

// Reference path: the same QFI through the dense generic machinery.
inline double jq_dense(const QdrProbe& probe, const ScenarioParams& scen, int dense_threshold = 48) {
    auto [received, d_cov] = build_qdr_received(probe, scen);
    const double mu = scen.mu();
    return qfi_gaussian(received.mean, received.cov, Vector::Zero(received.layout.dim()), d_cov,
                        dense_threshold) /
           (mu * mu);
}

struct MatchedPair {
    CdrProbe cdr;
    QdrProbe qdr;
    double jc = 0.0;   // classical baseline (narrowband form)
    double jq = 0.0;
    double ratio = 0.0;
};

// Matched comparison: equal N_S, equal pulse duration and equal center
// frequency; the classical baseline uses the narrowband approximation, as in
// all the ratio maps.
inline MatchedPair matched_pair(double sigma_p, double eps, double xi, const ScenarioParams& scen,
                                double tail_tol = 1e-10) {
    scen.validate();
    const SchmidtSpectrum spectrum = schmidt_spectrum(sigma_p, eps, tail_tol);
    if (spectrum.K <= 1.0)
        throw degenerate_duration("matched_pair: K = 1 (separable JSA), matched duration undefined");
    MatchedPair mp;
    mp.qdr = QdrProbe::make(spectrum, xi);
    const double ns = mp.qdr.ns();
    const double dt = mp.qdr.dt();
    mp.cdr = CdrProbe::from_duration(std::sqrt(ns), scen.omega_c, dt);
    mp.jc = jc_approx(ns, dt, scen);
    mp.jq = jq(mp.qdr, scen);
    mp.ratio = mp.jq / mp.jc;
    return mp;
}

}  // namespace qdr
