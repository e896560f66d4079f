#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "qdr/doppler.hpp"
#include "qdr/protocols.hpp"

using namespace qdr;

namespace {

// Baseline scenario: v = 100 m/s, lambda = 6 pi cm carrier.
ScenarioParams baseline_scenario(double eta, double nb) {
    return {100.0, 2.0 * M_PI * c_light / (0.06 * M_PI), eta, nb};
}

}  // namespace

TEST_CASE("scenario validation and doppler factor") {
    ScenarioParams s = baseline_scenario(0.5, 1.0);
    REQUIRE_NOTHROW(s.validate());
    REQUIRE(s.mu() == Catch::Approx((c_light - 100.0) / (c_light + 100.0)).epsilon(1e-15));
    s.eta = 1.5;
    REQUIRE_THROWS_AS(s.validate(), invalid_argument);
    s.eta = 0.5;
    s.nb = -0.1;
    REQUIRE_THROWS_AS(s.validate(), invalid_argument);
}

TEST_CASE("cdr probe: duration and mode-shape integral") {
    const double wc = 1e10;
    const CdrProbe p = CdrProbe::from_duration(2.0, wc, 3e-9);
    REQUIRE(p.dt() == Catch::Approx(3e-9).epsilon(1e-12));
    REQUIRE(p.ns() == Catch::Approx(4.0));
    // Analytic value of the shape integral: 1/2 + wc^2 dT^2.
    const double expect = 0.5 + wc * wc * p.dt() * p.dt();
    REQUIRE(cdr_mode_norm(p) == Catch::Approx(expect).epsilon(1e-12));
}

TEST_CASE("classical qfi: exact, machinery and narrowband forms") {
    const ScenarioParams scen = baseline_scenario(0.7, 2.0);
    const CdrProbe p = CdrProbe::from_duration(1.3, scen.omega_c, 2e-9);
    const double je = jc_exact(p, scen);
    REQUIRE(je > 0.0);
    REQUIRE(jc_via_gaussian_machinery(p, scen) == Catch::Approx(je).epsilon(1e-10));
    // The relative narrowband error is exactly (1/2) / (wc^2 dT^2 + 1/2).
    const double ja = jc_approx(p.ns(), p.dt(), scen);
    const double x = scen.omega_c * p.dt();
    REQUIRE((je - ja) / je == Catch::Approx(0.5 / (x * x + 0.5)).epsilon(1e-9));
    // Exact scalings in eta and thermal noise.
    const ScenarioParams scen2 = baseline_scenario(0.35, 2.0);
    REQUIRE(jc_exact(p, scen2) == Catch::Approx(0.5 * je).epsilon(1e-12));
    const ScenarioParams scen3 = baseline_scenario(0.7, 4.5);
    REQUIRE(jc_exact(p, scen3) == Catch::Approx(je * 5.0 / 10.0).epsilon(1e-12));
}

TEST_CASE("spdc probe: photon number, duration and squeezing inversion") {
    const SchmidtSpectrum sp = schmidt_spectrum(1.0, 3.0);
    const QdrProbe probe = QdrProbe::make(sp, sp.K);
    double ns = 0.0, num = 0.0;
    for (std::size_t m = 0; m < probe.ns_m.size(); ++m) {
        const double shm = std::sinh(sp.K * sp.r[m]);
        REQUIRE(probe.ns_m[m] == Catch::Approx(shm * shm).margin(1e-15));
        ns += probe.ns_m[m];
        num += (static_cast<double>(m) + 0.5) * probe.ns_m[m];
    }
    REQUIRE(probe.ns() == Catch::Approx(ns));
    REQUIRE(probe.dt() == Catch::Approx(sp.scale() * std::sqrt(num / ns)).epsilon(1e-12));

    const double xi = xi_for_signal_photons(sp, ns);
    REQUIRE(xi == Catch::Approx(sp.K).epsilon(1e-10));
}

TEST_CASE("received state: physical, correct blocks, derivative antisymmetric source") {
    const ScenarioParams scen = baseline_scenario(0.6, 1.5);
    const QdrProbe probe = QdrProbe::make(schmidt_spectrum(1.0, 3.0, 1e-6), 0.8);
    auto [state, d_cov] = build_qdr_received(probe, scen);
    REQUIRE_NOTHROW(state.validate());
    const int pairs = static_cast<int>(probe.ns_m.size());
    const int n_sig = pairs + qdr_buffer_modes;
    REQUIRE(state.layout.dim() == 2 * (n_sig + pairs));
    // First pair block.
    const double n0 = probe.ns_m[0];
    REQUIRE(state.cov(0, 0) ==
            Catch::Approx(2.0 * scen.eta * n0 + 2.0 * scen.nb + 1.0).epsilon(1e-12));
    const int i0 = 2 * n_sig;
    REQUIRE(state.cov(0, i0) ==
            Catch::Approx(std::sqrt(scen.eta) * 2.0 * std::sqrt(n0 * (n0 + 1.0))).epsilon(1e-12));
    REQUIRE(state.cov(1, i0 + 1) == Catch::Approx(-state.cov(0, i0)).epsilon(1e-12));
    // Buffer signal modes are bare thermal.
    REQUIRE(state.cov(2 * pairs, 2 * pairs) == Catch::Approx(2.0 * scen.nb + 1.0));
    REQUIRE((d_cov - d_cov.transpose()).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("compact covariance derivative matches the channel finite difference") {
    // Abstract small-frequency configuration keeps the finite difference of
    // the reshuffling matrix well inside the truncated basis.
    const ScenarioParams scen{0.0, 2.0, 0.6, 0.8};  // v = 0: mu exactly 1
    const QdrProbe probe = QdrProbe::make(schmidt_spectrum(1.0, 3.0, 1e-6), 0.7);
    auto [state, d_cov] = build_qdr_received(probe, scen);
    const int pairs = static_cast<int>(probe.ns_m.size());
    const int big = 40;

    auto full_cov = [&](double mu) {
        // Rebuild with a wide basis and crop to the compact layout.
        const int n_sig_small = pairs + qdr_buffer_modes;
        const int nbig = 2 * (big + pairs);
        Matrix dev = Matrix::Zero(nbig, nbig);
        for (int m = 0; m < pairs; ++m) {
            const double nm = probe.ns_m[(std::size_t)m];
            const double s = 2.0 * nm, c = 2.0 * std::sqrt(nm * (nm + 1.0));
            const int si = 2 * m, ii = 2 * (big + m);
            dev(si, si) = dev(si + 1, si + 1) = s;
            dev(ii, ii) = dev(ii + 1, ii + 1) = s;
            dev(si, ii) = dev(ii, si) = c;
            dev(si + 1, ii + 1) = dev(ii + 1, si + 1) = -c;
        }
        const Eigen::MatrixXd u = doppler_unitary_matrix(
            HermiteGaussBasis{scen.omega_c, probe.spectrum.scale(), big - 1}, mu);
        Matrix x = Matrix::Zero(nbig, nbig);
        const double se = std::sqrt(scen.eta);
        for (int k = 0; k < big; ++k)
            for (int j = 0; j < big; ++j) {
                x(2 * k, 2 * j) = se * u(k, j);
                x(2 * k + 1, 2 * j + 1) = se * u(k, j);
            }
        for (int i = 2 * big; i < nbig; ++i) x(i, i) = 1.0;
        Matrix cov = x * dev * x.transpose();
        for (int i = 0; i < 2 * big; ++i) cov(i, i) += 2.0 * scen.nb + 1.0;
        for (int i = 2 * big; i < nbig; ++i) cov(i, i) += 1.0;
        // Crop to [signal 0..n_sig_small-1, idlers].
        const int nsmall = 2 * (n_sig_small + pairs);
        Matrix out(nsmall, nsmall);
        auto map = [&](int idx) {
            return idx < 2 * n_sig_small ? idx : idx - 2 * n_sig_small + 2 * big;
        };
        for (int i = 0; i < nsmall; ++i)
            for (int j = 0; j < nsmall; ++j) out(i, j) = cov(map(i), map(j));
        return out;
    };

    auto fd_err = [&](double h) {
        const Matrix fd = (full_cov(1.0 + h) - full_cov(1.0 - h)) / (2.0 * h);
        return (fd - d_cov).cwiseAbs().maxCoeff() / d_cov.cwiseAbs().maxCoeff();
    };
    const double e1 = fd_err(1e-2);
    const double e2 = fd_err(5e-3);
    REQUIRE(e1 < 1e-3);
    REQUIRE(e2 < e1 / 4.0 * 1.3);  // O(h^2)
}

TEST_CASE("quantum qfi: block and dense paths agree") {
    const ScenarioParams scen = baseline_scenario(0.6, 1.5);
    const QdrProbe probe = QdrProbe::make(schmidt_spectrum(1.0, 3.0, 1e-6), 0.8);
    const double jb = jq(probe, scen);
    REQUIRE(jb > 0.0);
    REQUIRE(jq_dense(probe, scen) == Catch::Approx(jb).epsilon(1e-10));
    // Conjugate-gradient large-system path gives the same answer.
    REQUIRE(jq_dense(probe, scen, /*dense_threshold=*/0) == Catch::Approx(jb).epsilon(1e-7));
}

TEST_CASE("quantum qfi: pure received state is rejected") {
    const ScenarioParams scen = baseline_scenario(1.0, 0.0);
    const QdrProbe probe = QdrProbe::make(schmidt_spectrum(1.0, 3.0, 1e-6), 0.8);
    REQUIRE_THROWS_AS(jq(probe, scen), pure_state_error);
}

TEST_CASE("quantum qfi: non-increasing in thermal noise, proportional trends") {
    const QdrProbe probe = QdrProbe::make(schmidt_spectrum(1.0, 3.0), 0.5);
    double prev = jq(probe, baseline_scenario(0.8, 0.05));
    for (double nb : {0.2, 1.0, 5.0, 20.0}) {
        const double cur = jq(probe, baseline_scenario(0.8, nb));
        REQUIRE(cur > 0.0);
        REQUIRE(cur <= prev * (1.0 + 1e-12));
        prev = cur;
    }
}

TEST_CASE("matched pair: consistent ratio and degenerate separable case") {
    const ScenarioParams scen = baseline_scenario(0.5, 5.0);
    const MatchedPair mp = matched_pair(scen.omega_c / 50.0, 3.0 * scen.omega_c / 50.0,
                                        0.4, scen);
    REQUIRE(mp.jc == Catch::Approx(jc_approx(mp.qdr.ns(), mp.qdr.dt(), scen)).epsilon(1e-12));
    REQUIRE(mp.ratio == Catch::Approx(mp.jq / mp.jc).epsilon(1e-12));
    REQUIRE(mp.cdr.ns() == Catch::Approx(mp.qdr.ns()).epsilon(1e-12));
    REQUIRE(mp.cdr.dt() == Catch::Approx(mp.qdr.dt()).epsilon(1e-12));
    REQUIRE_THROWS_AS(matched_pair(1.0, 1.0, 0.4, scen), degenerate_duration);
}

TEST_CASE("photon floor: deep truncation tail does not destabilize the qfi") {
    // A very tight tail tolerance retains modes whose occupation underflows
    // toward vacuum; they must be demoted, not propagated as near-pure pairs.
    const ScenarioParams scen = baseline_scenario(0.8, 1.0);
    const QdrProbe wide = QdrProbe::make(schmidt_spectrum(1.0, 3.0, 1e-14), 0.05);
    const QdrProbe narrow = QdrProbe::make(schmidt_spectrum(1.0, 3.0, 1e-8), 0.05);
    const double jw = jq(wide, scen);
    const double jn = jq(narrow, scen);
    REQUIRE(jw == Catch::Approx(jn).epsilon(1e-5));
}
