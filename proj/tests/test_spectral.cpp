#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>

#include <cmath>

#include "qdr/doppler.hpp"
#include "qdr/hermite.hpp"
#include "qdr/schmidt.hpp"

using namespace qdr;

TEST_CASE("gauss-hermite rule integrates gaussian moments") {
    for (int order : {8, 64, 250}) {
        const GaussHermiteRule rule = gauss_hermite(order);
        double m0 = 0.0, m2 = 0.0;
        for (int i = 0; i < order; ++i) {
            const double t = rule.nodes(i);
            const double w = rule.modified_weights(i) * std::exp(-t * t);
            m0 += w;
            m2 += w * t * t;
        }
        REQUIRE(m0 == Catch::Approx(std::sqrt(M_PI)).epsilon(1e-12));
        REQUIRE(m2 == Catch::Approx(0.5 * std::sqrt(M_PI)).epsilon(1e-12));
        // Modified weights stay O(1) even at large order.
        REQUIRE(rule.modified_weights.maxCoeff() < 10.0);
        REQUIRE(rule.modified_weights.minCoeff() > 0.0);
    }
}

TEST_CASE("hermite functions are orthonormal under the rule") {
    const int nmax = 40;
    const GaussHermiteRule rule = gauss_hermite(4 * (nmax + 1));
    const Eigen::VectorXd gauss = (-0.5 * rule.nodes.array().square()).exp().matrix();
    const Eigen::MatrixXd phi = hermite_rows(nmax, rule.nodes, gauss);
    const Eigen::MatrixXd gram = phi * rule.modified_weights.asDiagonal() * phi.transpose();
    REQUIRE((gram - Eigen::MatrixXd::Identity(nmax + 1, nmax + 1)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("hermite derivative matches finite differences") {
    const double h = 1e-6;
    for (int n : {0, 1, 3, 10}) {
        for (double y : {-2.3, 0.0, 0.7, 4.1}) {
            const double fd = (hermite_gauss_eval(n, y + h) - hermite_gauss_eval(n, y - h)) / (2 * h);
            REQUIRE(hermite_gauss_deriv(n, y) == Catch::Approx(fd).margin(1e-8));
        }
    }
}

TEST_CASE("doppler matrix reduces to the identity at unit factor") {
    const HermiteGaussBasis basis{40.0, 1.0, 30};
    const Eigen::MatrixXd u = doppler_unitary_matrix(basis, 1.0);
    REQUIRE((u - Eigen::MatrixXd::Identity(31, 31)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("doppler matrix is unitary on the interior block") {
    const int m = 60;
    const HermiteGaussBasis basis{40.0, 0.02, m};
    const Eigen::MatrixXd u = doppler_unitary_matrix(basis, 0.97);
    // Rows well inside the truncation see a numerically complete basis.
    const Eigen::MatrixXd g = u * u.transpose();
    const int keep = 30;
    REQUIRE((g.topLeftCorner(keep, keep) - Eigen::MatrixXd::Identity(keep, keep))
                .cwiseAbs()
                .maxCoeff() < 1e-10);
}

TEST_CASE("doppler matrices compose: U(mu) U(1/mu) = I on the interior") {
    const int m = 80;
    const HermiteGaussBasis basis{10.0, 0.05, m};
    const double mu = 0.9;
    const Eigen::MatrixXd prod =
        doppler_unitary_matrix(basis, mu) * doppler_unitary_matrix(basis, 1.0 / mu);
    const int keep = 25;
    REQUIRE((prod.topLeftCorner(keep, keep) - Eigen::MatrixXd::Identity(keep, keep))
                .cwiseAbs()
                .maxCoeff() < 1e-8);
}

TEST_CASE("generator: antisymmetry, selection rules and anchor elements") {
    const HermiteGaussBasis basis{7.5, 0.4, 12};
    const Eigen::MatrixXd d = doppler_generator(basis);
    REQUIRE((d + d.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    for (int k = 0; k <= 12; ++k)
        for (int j = 0; j <= 12; ++j)
            if (std::abs(k - j) != 1 && std::abs(k - j) != 2) REQUIRE(d(k, j) == 0.0);
    const double w0s = basis.omega0_s();
    REQUIRE(std::abs(d(0, 1)) == Catch::Approx(w0s / std::sqrt(2.0)));
    REQUIRE(std::abs(d(0, 2)) == Catch::Approx(std::sqrt(2.0) / 2.0));
}

TEST_CASE("generator matches the finite difference of the doppler matrix") {
    const HermiteGaussBasis small{7.5, 0.4, 10};
    const HermiteGaussBasis big{7.5, 0.4, 30};
    const Eigen::MatrixXd d = doppler_generator(small);
    auto fd_err = [&](double h) {
        const Eigen::MatrixXd fd = ((doppler_unitary_matrix(big, 1.0 + h) -
                                     doppler_unitary_matrix(big, 1.0 - h)) /
                                    (2.0 * h))
                                       .topLeftCorner(11, 11);
        return (fd - d).cwiseAbs().maxCoeff();
    };
    const double e1 = fd_err(1e-2);
    const double e2 = fd_err(5e-3);
    REQUIRE(e1 < 0.1);
    // O(h^2) convergence: quartering within 20%.
    REQUIRE(e2 < e1 / 4.0 * 1.2);
}

TEST_CASE("schmidt spectrum: closed-form weights and truncation rule") {
    const double sp = 1.0, eps = 3.0;
    const SchmidtSpectrum s = schmidt_spectrum(sp, eps);
    REQUIRE(s.K == Catch::Approx(5.0 / 3.0));
    REQUIRE(s.r[0] == Catch::Approx(std::sqrt(3.0) / 2.0));
    REQUIRE(s.r[1] / s.r[0] == Catch::Approx(-0.5));
    // Normalization minus the guaranteed tail bound.
    double sum2 = 0.0;
    for (double r : s.r) sum2 += r * r;
    REQUIRE(sum2 >= 1.0 - 1e-10);
    REQUIRE(sum2 <= 1.0 + 1e-14);
    // Tail rule: w^{M+1} <= tol < w^M with w = 1/4.
    REQUIRE(std::pow(0.25, s.M() + 1) <= 1e-10);
    REQUIRE(std::pow(0.25, s.M()) > 1e-10);

    // Separable case hits the floor of five retained modes.
    const SchmidtSpectrum sep = schmidt_spectrum(2.0, 2.0);
    REQUIRE(sep.M() == 4);
    REQUIRE(sep.r[0] == Catch::Approx(1.0));
    REQUIRE(sep.r[1] == 0.0);
    REQUIRE(sep.K == Catch::Approx(1.0));

    REQUIRE_THROWS_AS(schmidt_spectrum(-1.0, 1.0), invalid_argument);
    REQUIRE_THROWS_AS(schmidt_spectrum(1.0, 1.0, 2.0), invalid_argument);
}

TEST_CASE("schmidt spectrum is symmetric under bandwidth exchange up to signs") {
    const SchmidtSpectrum a = schmidt_spectrum(1.0, 3.0);
    const SchmidtSpectrum b = schmidt_spectrum(3.0, 1.0);
    REQUIRE(a.K == Catch::Approx(b.K));
    REQUIRE(a.M() == b.M());
    for (int i = 0; i <= a.M(); ++i)
        REQUIRE(std::abs(a.r[(std::size_t)i]) == Catch::Approx(std::abs(b.r[(std::size_t)i])));
}

TEST_CASE("jsa evaluation: normalization and schmidt reconstruction") {
    const double sp = 1.0, eps = 3.0, wp = 50.0;
    // Numerical L2 norm over a grid.
    const int n = 400;
    const double l = 12.0;
    const double step = 2.0 * l / (n - 1);
    double norm = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double ws = wp / 2 - l + i * step;
            const double wi = wp / 2 - l + j * step;
            const double f = jsa_eval(sp, eps, wp, ws, wi);
            norm += f * f * step * step;
        }
    REQUIRE(norm == Catch::Approx(1.0).epsilon(1e-6));

    // Pointwise reconstruction from the separable expansion.
    const SchmidtSpectrum s = schmidt_spectrum(sp, eps, 1e-14);
    const double scale = s.scale();
    for (double ws : {wp / 2 - 1.2, wp / 2 + 0.3}) {
        for (double wi : {wp / 2 - 0.4, wp / 2 + 0.9}) {
            double acc = 0.0;
            for (int m = 0; m <= s.M(); ++m)
                acc += s.r[(std::size_t)m] * std::sqrt(scale) *
                       hermite_gauss_eval(m, scale * (ws - wp / 2)) * std::sqrt(scale) *
                       hermite_gauss_eval(m, scale * (wi - wp / 2));
            REQUIRE(acc == Catch::Approx(jsa_eval(sp, eps, wp, ws, wi)).margin(1e-7));
        }
    }
}
