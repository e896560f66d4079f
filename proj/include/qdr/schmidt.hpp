#pragma once

// Analytic Schmidt decomposition of the double-Gaussian joint spectral
// amplitude: geometric weight sequence r_m, Schmidt number K, and pointwise
// JSA evaluation.

#include <cmath>
#include <vector>

#include "qdr/errors.hpp"

namespace qdr {

struct SchmidtSpectrum {
    double sigma_p;         // pump bandwidth (rad/s)
    double eps;             // phase-matching bandwidth (rad/s)
    std::vector<double> r;  // weights r_0..r_M (signed; may alternate)
    double K;               // Schmidt number
    int M() const { return static_cast<int>(r.size()) - 1; }

    // Basis time scale shared by signal and idler Schmidt modes.
    double scale() const { return std::sqrt(2.0 / (sigma_p * eps)); }
};

// Weights r_m = (2 sqrt(sp*eps)/(sp+eps)) q^m with q = (sp-eps)/(sp+eps);
// the truncation order M is the smallest order whose tail weight is <=
// tail_tol, floored at M = 4.
inline SchmidtSpectrum schmidt_spectrum(double sigma_p, double eps, double tail_tol = 1e-10) {
    if (sigma_p <= 0.0 || eps <= 0.0)
        throw invalid_argument("schmidt_spectrum: bandwidths must be positive");
    if (tail_tol <= 0.0 || tail_tol >= 1.0)
        throw invalid_argument("schmidt_spectrum: tail_tol must lie in (0,1)");
    const double q = (sigma_p - eps) / (sigma_p + eps);
    const double r0 = 2.0 * std::sqrt(sigma_p * eps) / (sigma_p + eps);
    const double w = q * q;  // weight ratio of consecutive r_m^2
    // Tail after index M:  sum_{m>M} r0^2 w^m = w^{M+1}  (since r0^2 = 1-w).
    int m = 4;
    if (w > 0.0)
        while (std::pow(w, m + 1) > tail_tol) ++m;
    SchmidtSpectrum sp;
    sp.sigma_p = sigma_p;
    sp.eps = eps;
    sp.K = (sigma_p * sigma_p + eps * eps) / (2.0 * sigma_p * eps);
    sp.r.resize(static_cast<std::size_t>(m) + 1);
    double rm = r0;
    for (int i = 0; i <= m; ++i, rm *= q) sp.r[static_cast<std::size_t>(i)] = rm;
    return sp;
}

// Double-Gaussian JSA value at (w_S, w_I) for pump frequency w_p.
inline double jsa_eval(double sigma_p, double eps, double omega_p, double omega_s, double omega_i) {
    if (sigma_p <= 0.0 || eps <= 0.0)
        throw invalid_argument("jsa_eval: bandwidths must be positive");
    const double u = omega_s + omega_i - omega_p;
    const double v = omega_s - omega_i;
    return std::sqrt(2.0 / (M_PI * sigma_p * eps)) *
           std::exp(-u * u / (2.0 * sigma_p * sigma_p) - v * v / (2.0 * eps * eps));
}

}  // namespace qdr
