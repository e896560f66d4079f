#pragma once

// Finite-mode Gaussian states on quadratures [Q_1, P_1, ..., Q_M, P_M],
// with the vacuum-covariance-equal-identity convention (Q = (A + A†)/√2).
// Provides the symplectic form, channel application, symplectic spectra,
// Uhlmann fidelity and the moment-based quantum Fisher information.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "qdr/errors.hpp"

namespace qdr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class ModeRole { signal, idler, aux };

struct ModeLabel {
    ModeRole role;
    int index;
    bool operator==(const ModeLabel&) const = default;
};

// Ordered list of labeled modes; quadratures are interleaved.
struct ModeLayout {
    std::vector<ModeLabel> labels;

    int count() const { return static_cast<int>(labels.size()); }
    int dim() const { return 2 * count(); }

    static ModeLayout signal_idler(int n_signal, int n_idler) {
        ModeLayout l;
        l.labels.reserve(static_cast<std::size_t>(n_signal + n_idler));
        for (int i = 0; i < n_signal; ++i) l.labels.push_back({ModeRole::signal, i});
        for (int i = 0; i < n_idler; ++i) l.labels.push_back({ModeRole::idler, i});
        return l;
    }
    static ModeLayout plain(int n) {
        ModeLayout l;
        for (int i = 0; i < n; ++i) l.labels.push_back({ModeRole::aux, i});
        return l;
    }
};

// Block-diagonal symplectic form, one [[0,1],[-1,0]] block per mode.
inline Matrix symplectic_form(int mode_count) {
    if (mode_count < 1) throw invalid_argument("symplectic_form: mode_count must be >= 1");
    Matrix om = Matrix::Zero(2 * mode_count, 2 * mode_count);
    for (int m = 0; m < mode_count; ++m) {
        om(2 * m, 2 * m + 1) = 1.0;
        om(2 * m + 1, 2 * m) = -1.0;
    }
    return om;
}

// Minimum eigenvalue of the Hermitian matrix  cov + i*Omega ; physical
// covariances give values >= 0 up to roundoff.
inline double physicality_defect(const Matrix& cov) {
    const int m = static_cast<int>(cov.rows()) / 2;
    Eigen::MatrixXcd h = cov.cast<std::complex<double>>();
    h += std::complex<double>(0.0, 1.0) * symplectic_form(m).cast<std::complex<double>>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

struct GaussianState {
    ModeLayout layout;
    Vector mean;
    Matrix cov;

    void validate() const {
        if (mean.size() != layout.dim() || cov.rows() != layout.dim() || cov.cols() != layout.dim())
            throw invalid_argument("GaussianState: dimension mismatch with layout");
        if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, cov.cwiseAbs().maxCoeff()))
            throw invalid_argument("GaussianState: covariance not symmetric");
        if (physicality_defect(cov) < -1e-10)
            throw invalid_argument("GaussianState: covariance violates the uncertainty relation");
    }

    static GaussianState vacuum(int modes) {
        return {ModeLayout::plain(modes), Vector::Zero(2 * modes), Matrix::Identity(2 * modes, 2 * modes)};
    }
};

struct GaussianChannel {
    Matrix X;
    Matrix Y;

    // min-eig of  Y + i Omega - i X Omega X^T ; >= 0 for a CP map.
    double cp_defect() const {
        const int m = static_cast<int>(X.rows()) / 2;
        const Matrix om = symplectic_form(m);
        Eigen::MatrixXcd h = Y.cast<std::complex<double>>();
        h += std::complex<double>(0.0, 1.0) * (om - X * om * X.transpose()).cast<std::complex<double>>();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
    }

    bool is_unitary(double tol = 1e-10) const {
        const int m = static_cast<int>(X.rows()) / 2;
        const Matrix om = symplectic_form(m);
        return Y.cwiseAbs().maxCoeff() <= tol &&
               (X * om * X.transpose() - om).cwiseAbs().maxCoeff() <= tol;
    }
};

inline GaussianState apply_channel(const GaussianState& state, const GaussianChannel& ch) {
    if (ch.X.rows() != state.layout.dim() || ch.Y.rows() != state.layout.dim())
        throw invalid_argument("apply_channel: dimension mismatch");
    if (ch.cp_defect() < -1e-10)
        throw invalid_channel("apply_channel: channel is not completely positive");
    GaussianState out{state.layout, ch.X * state.mean,
                      ch.X * state.cov * ch.X.transpose() + ch.Y};
    out.cov = 0.5 * (out.cov + out.cov.transpose());
    return out;
}

// Symplectic eigenvalues: moduli of the eigenvalues of i*Omega*cov, each
// listed once, descending.  Physical covariances give values >= 1.
inline std::vector<double> symplectic_eigenvalues(const Matrix& cov) {
    if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, cov.cwiseAbs().maxCoeff()))
        throw invalid_argument("symplectic_eigenvalues: input not symmetric");
    const int m = static_cast<int>(cov.rows()) / 2;
    Eigen::EigenSolver<Matrix> es(symplectic_form(m) * cov, false);
    std::vector<double> all(static_cast<std::size_t>(2 * m));
    for (int i = 0; i < 2 * m; ++i) all[static_cast<std::size_t>(i)] = std::abs(es.eigenvalues()(i));
    std::sort(all.begin(), all.end(), std::greater<double>());
    std::vector<double> nu;
    nu.reserve(static_cast<std::size_t>(m));
    for (int i = 0; i < 2 * m; i += 2) nu.push_back(0.5 * (all[static_cast<std::size_t>(i)] + all[static_cast<std::size_t>(i + 1)]));
    return nu;
}

namespace detail {

// Action of the QFI superoperator (cov (x) cov - Om (x) Om in vectorized
// form):  X -> cov X cov + Om X Om, since Om^T = -Om.
inline Matrix qfi_superop(const Matrix& cov, const Matrix& om, const Matrix& x) {
    return cov * x * cov + om * x * om;
}

// Matrix-free conjugate gradient for  (cov (x) cov - Om (x) Om) vec(X) = vec(B).
// The operator is symmetric positive definite on mixed-state covariances.
inline Matrix qfi_solve_cg(const Matrix& cov, const Matrix& om, const Matrix& b,
                           double tol = 1e-13, int max_iter = 20000) {
    Matrix x = Matrix::Zero(b.rows(), b.cols());
    Matrix r = b;
    Matrix p = r;
    double rs = r.squaredNorm();
    const double target = tol * tol * b.squaredNorm();
    for (int it = 0; it < max_iter && rs > target; ++it) {
        const Matrix ap = qfi_superop(cov, om, p);
        const double alpha = rs / p.cwiseProduct(ap).sum();
        x += alpha * p;
        r -= alpha * ap;
        const double rs_new = r.squaredNorm();
        p = r + (rs_new / rs) * p;
        rs = rs_new;
    }
    return x;
}

inline Matrix qfi_solve_direct(const Matrix& cov, const Matrix& om, const Matrix& b) {
    const int n = static_cast<int>(cov.rows());
    Matrix k = Matrix::Zero(n * n, n * n);
    // kron(A, A) vec(X) = vec(A X A^T) with column-major vec; the Om term
    // flips sign through Om^T = -Om.
    for (int c = 0; c < n; ++c)
        for (int r = 0; r < n; ++r) {
            k.block(r * n, c * n, n, n) += cov(c, r) * cov;
            k.block(r * n, c * n, n, n) += om(c, r) * om;
        }
    Eigen::Map<const Vector> bv(b.data(), n * n);
    Vector xv = k.partialPivLu().solve(bv);
    return Eigen::Map<const Matrix>(xv.data(), n, n);
}

}  // namespace detail

// Quantum Fisher information of a Gaussian family from moments and their
// parameter derivatives:
//   J = 2 d_mean^T cov^{-1} d_mean + 1/2 vec(d_cov)^T (cov(x)cov - Om(x)Om)^{-1} vec(d_cov).
// The linear system is solved directly up to `dense_threshold` quadratures and
// by matrix-free conjugate gradient above it.
inline double qfi_gaussian(const Vector& mean, const Matrix& cov_in, const Vector& d_mean,
                           const Matrix& d_cov_in, int dense_threshold = 48) {
    (void)mean;
    const int n = static_cast<int>(cov_in.rows());
    if (d_mean.size() != n || d_cov_in.rows() != n || d_cov_in.cols() != n)
        throw invalid_argument("qfi_gaussian: dimension mismatch");
    const double scale = std::max(1.0, cov_in.cwiseAbs().maxCoeff());
    if ((cov_in - cov_in.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw invalid_argument("qfi_gaussian: covariance not symmetric");
    const double dscale = std::max(1.0, d_cov_in.cwiseAbs().maxCoeff());
    if ((d_cov_in - d_cov_in.transpose()).cwiseAbs().maxCoeff() > 1e-10 * dscale)
        throw invalid_argument("qfi_gaussian: d_cov not symmetric");
    const Matrix cov = 0.5 * (cov_in + cov_in.transpose());
    const Matrix d_cov = 0.5 * (d_cov_in + d_cov_in.transpose());

    double j = 0.0;
    if (d_mean.squaredNorm() > 0.0)
        j += 2.0 * d_mean.dot(cov.llt().solve(d_mean));

    if (d_cov.cwiseAbs().maxCoeff() > 0.0) {
        const auto nus = symplectic_eigenvalues(cov);
        if (nus.back() <= 1.0 + 1e-9)
            throw pure_state_error("qfi_gaussian: covariance too close to the pure-state boundary");
        const Matrix om = symplectic_form(n / 2);
        const Matrix x = (n <= dense_threshold) ? detail::qfi_solve_direct(cov, om, d_cov)
                                                : detail::qfi_solve_cg(cov, om, d_cov);
        j += 0.5 * d_cov.cwiseProduct(x).sum();
    }
    return j;
}

// Uhlmann fidelity F(a, b) = Tr sqrt( sqrt(a) b sqrt(a) ) of two Gaussian
// states, evaluated from moments.  Determinants are accumulated in log
// space so large mode counts do not overflow.
inline double gaussian_fidelity(const GaussianState& a, const GaussianState& b) {
    a.validate();
    b.validate();
    if (a.layout.dim() != b.layout.dim())
        throw invalid_argument("gaussian_fidelity: layout mismatch");
    const int n = a.layout.dim();
    const int m = n / 2;
    const Matrix om = symplectic_form(m);
    // Work with V = cov/2 (vacuum variance 1/2); means are unchanged.
    const Matrix v1 = 0.5 * a.cov;
    const Matrix v2 = 0.5 * b.cov;
    const Matrix vsum = v1 + v2;
    Eigen::PartialPivLU<Matrix> lu_sum(vsum);
    const Vector d = b.mean - a.mean;
    const double expo = -0.25 * d.dot(lu_sum.solve(d));

    const Matrix vaux = om.transpose() * lu_sum.solve(0.25 * om + v2 * om * v1);
    const Matrix w = vaux * om;
    const Matrix winv = w.partialPivLu().solve(Matrix::Identity(n, n));
    // Tiny diagonal shift keeps the Schur square root well-defined when the
    // argument is singular (pure states make it exactly zero).
    const Eigen::MatrixXcd arg =
        (Matrix::Identity(n, n) + 0.25 * winv * winv +
         1e-26 * std::max(1.0, winv.cwiseAbs().maxCoeff()) * Matrix::Identity(n, n))
            .cast<std::complex<double>>();
    const Eigen::MatrixXcd root = arg.sqrt();
    const Matrix num = (2.0 * (root.real() + Matrix::Identity(n, n)) * vaux);

    auto logabsdet = [](const Matrix& mat) {
        Eigen::PartialPivLU<Matrix> lu(mat);
        double s = 0.0;
        for (int i = 0; i < mat.rows(); ++i) s += std::log(std::abs(lu.matrixLU()(i, i)));
        return s;
    };
    const double log_f = 0.25 * (logabsdet(num) - logabsdet(vsum)) + expo;
    return std::min(std::exp(log_f), 1.0 + 1e-12);
}

}  // namespace qdr
