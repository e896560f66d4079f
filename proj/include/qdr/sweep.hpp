#pragma once

// Batch sweep engine: run the matched classical/quantum comparison over a
// parameter grid with a worker pool, write deterministic CSV output, and
// optionally emit static SVG ratio heatmaps.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "qdr/config.hpp"
#include "qdr/errors.hpp"
#include "qdr/protocols.hpp"

namespace qdr {

inline constexpr const char* qdr_version = "1.0.0";

struct SweepRow {
    double eta = 0.0, nb = 0.0, c_xi = 0.0, sigma_p = 0.0, eps = 0.0;
    double xi = 0.0, ns = 0.0, dt = 0.0, schmidt_k = 0.0;
    int m_used = 0;
    double jc = 0.0, jq = 0.0, ratio = 0.0, ratio_db = 0.0;
    double wall_time = 0.0;  // seconds; not written to CSV (non-deterministic)
};

namespace detail {

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Deterministic pseudo-random selector for audit rows (Knuth hash).
inline bool audit_selected(std::size_t index, double fraction) {
    if (fraction <= 0.0) return false;
    const std::uint64_t h = (index * 2654435761u) & 0xffffffffu;
    return static_cast<double>(h) / 4294967296.0 < fraction;
}

}  // namespace detail

inline SweepRow evaluate_point(const SweepSpec& spec, double eta, double nb, double c_xi,
                               double sigma_p) {
    const auto t0 = std::chrono::steady_clock::now();
    SweepRow row;
    row.eta = eta;
    row.nb = nb;
    row.c_xi = c_xi;
    row.sigma_p = sigma_p;
    row.eps = spec.eps;
    const ScenarioParams scen{spec.v, spec.omega_c, eta, nb};
    const SchmidtSpectrum spectrum = schmidt_spectrum(sigma_p, spec.eps, spec.tail_tol);
    row.schmidt_k = spectrum.K;
    row.m_used = spectrum.M();
    row.xi = c_xi * spectrum.K;
    const MatchedPair mp = matched_pair(sigma_p, spec.eps, row.xi, scen, spec.tail_tol);
    row.ns = mp.qdr.ns();
    row.dt = mp.qdr.dt();
    row.jc = mp.jc;
    row.jq = mp.jq;
    row.ratio = mp.ratio;
    row.ratio_db = 10.0 * std::log10(mp.ratio);
    if (!std::isfinite(row.ratio_db) || !(row.jc > 0.0) || !(row.jq > 0.0))
        throw oracle_failure("evaluate_point: non-finite or non-positive result");
    row.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return row;
}

struct SweepResult {
    std::vector<SweepRow> rows;
    std::string csv_path;
    std::vector<std::string> plot_paths;
};

namespace detail {

inline void write_csv(const SweepSpec& spec, const std::vector<SweepRow>& rows,
                      const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open output file: " + path);
    char hash[32];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(fnv1a(spec_fingerprint(spec))));
    out << "# qdr version=" << qdr_version << " spec_hash=" << hash << "\n";
    out << "eta,nb,c_xi,sigma_p,eps,xi,ns,dt,schmidt_k,m_used,jc,jq,ratio,ratio_db\n";
    for (const SweepRow& r : rows) {
        out << fmt17(r.eta) << ',' << fmt17(r.nb) << ',' << fmt17(r.c_xi) << ','
            << fmt17(r.sigma_p) << ',' << fmt17(r.eps) << ',' << fmt17(r.xi) << ','
            << fmt17(r.ns) << ',' << fmt17(r.dt) << ',' << fmt17(r.schmidt_k) << ','
            << r.m_used << ',' << fmt17(r.jc) << ',' << fmt17(r.jq) << ',' << fmt17(r.ratio)
            << ',' << fmt17(r.ratio_db) << "\n";
    }
    if (!out) throw io_error("failed writing output file: " + path);
}

inline std::string heat_color(double t) {
    // Blue (low) -> white -> red (high), t in [0,1].
    t = std::min(1.0, std::max(0.0, t));
    int r, g, b;
    if (t < 0.5) {
        const double u = t / 0.5;
        r = static_cast<int>(255 * u);
        g = static_cast<int>(255 * u);
        b = 255;
    } else {
        const double u = (t - 0.5) / 0.5;
        r = 255;
        g = static_cast<int>(255 * (1.0 - u));
        b = static_cast<int>(255 * (1.0 - u));
    }
    char buf[16];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
    return buf;
}

// One heatmap per c_xi value: ratio_db over (eta, nb), both axes log-scaled.
inline std::vector<std::string> write_heatmaps(const SweepSpec& spec,
                                               const std::vector<SweepRow>& rows,
                                               const std::string& dir) {
    std::vector<std::string> paths;
    if (spec.eta.size() < 2 || spec.nb.size() < 2 || spec.sigma_p.size() != 1) return paths;
    const std::size_t ne = spec.eta.size(), nb = spec.nb.size(), nc = spec.c_xi.size();
    double lo = rows.front().ratio_db, hi = lo;
    for (const auto& r : rows) {
        lo = std::min(lo, r.ratio_db);
        hi = std::max(hi, r.ratio_db);
    }
    if (hi <= lo) hi = lo + 1.0;
    const int cell = 18, margin = 40;
    for (std::size_t ci = 0; ci < nc; ++ci) {
        std::ostringstream name;
        name << dir << "/heatmap_cxi_" << ci << ".svg";
        std::ofstream out(name.str(), std::ios::binary);
        if (!out) throw io_error("cannot open plot file: " + name.str());
        const int w = margin * 2 + cell * static_cast<int>(nb);
        const int h = margin * 2 + cell * static_cast<int>(ne);
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
            << "\">\n";
        out << "<text x=\"" << margin << "\" y=\"20\" font-size=\"12\">ratio_dB over log N_B "
            << "(x) / log eta (y), c_xi = " << fmt17(spec.c_xi[ci]) << "</text>\n";
        for (std::size_t ei = 0; ei < ne; ++ei)
            for (std::size_t bi = 0; bi < nb; ++bi) {
                // Row order: eta outermost, then nb, c_xi, sigma_p.
                const SweepRow& r = rows[((ei * nb + bi) * nc + ci) * spec.sigma_p.size()];
                const double t = (r.ratio_db - lo) / (hi - lo);
                out << "<rect x=\"" << margin + cell * static_cast<int>(bi) << "\" y=\""
                    << margin + cell * static_cast<int>(ne - 1 - ei) << "\" width=\"" << cell
                    << "\" height=\"" << cell << "\" fill=\"" << heat_color(t) << "\"/>\n";
            }
        out << "</svg>\n";
        paths.push_back(name.str());
    }
    return paths;
}

}  // namespace detail

// Run the full grid.  Points are dispatched to a worker pool over an atomic
// counter; each worker writes only its own slot, so the row order (and the
// CSV bytes) are independent of the worker count.
inline SweepResult run_sweep(const SweepSpec& spec) {
    const std::size_t total =
        spec.eta.size() * spec.nb.size() * spec.c_xi.size() * spec.sigma_p.size();
    if (total == 0) throw invalid_argument("run_sweep: empty grid");
    std::vector<SweepRow> rows(total);
    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::string first_error;
    std::atomic<bool> failed{false};

    auto work = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= total || failed.load()) return;
            // Lexicographic index -> (eta, nb, c_xi, sigma_p).
            std::size_t rem = i;
            const std::size_t si = rem % spec.sigma_p.size();
            rem /= spec.sigma_p.size();
            const std::size_t ci = rem % spec.c_xi.size();
            rem /= spec.c_xi.size();
            const std::size_t bi = rem % spec.nb.size();
            const std::size_t ei = rem / spec.nb.size();
            try {
                rows[i] = evaluate_point(spec, spec.eta[ei], spec.nb[bi], spec.c_xi[ci],
                                         spec.sigma_p[si]);
                if (detail::audit_selected(i, spec.audit)) {
                    // Re-verify the fast block solver against the dense
                    // generic machinery.  The dense path cannot tolerate
                    // near-vacuum tail idlers, so audit on a probe trimmed
                    // to pairs safely above the pure-state boundary.
                    const ScenarioParams scen{spec.v, spec.omega_c, spec.eta[ei], spec.nb[bi]};
                    QdrProbe probe =
                        QdrProbe::make(schmidt_spectrum(spec.sigma_p[si], spec.eps, spec.tail_tol),
                                       rows[i].xi);
                    const double trim_floor = 1e-6 * (1.0 + probe.ns());
                    auto trimmable = [&](double nm) {
                        if (nm <= trim_floor) return true;
                        // Pairs the block solver would demote to their
                        // signal marginal must not reach the dense path.
                        const Matrix block =
                            detail::qdr_pair_block(nm, spec.eta[ei], spec.nb[bi]);
                        return symplectic_eigenvalues(block).back() <= 1.0 + 1e-9;
                    };
                    while (probe.ns_m.size() > 1 && trimmable(probe.ns_m.back())) {
                        probe.ns_m.pop_back();
                        probe.spectrum.r.pop_back();
                    }
                    const double fast = jq(probe, scen);
                    const double ref = jq_dense(probe, scen);
                    if (std::abs(ref - fast) > 1e-8 * std::abs(ref))
                        throw oracle_failure("audit: block and dense QFI paths disagree");
                }
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!failed.exchange(true)) {
                    std::ostringstream msg;
                    msg << e.what() << " [at eta=" << spec.eta[ei] << " nb=" << spec.nb[bi]
                        << " c_xi=" << spec.c_xi[ci] << " sigma_p=" << spec.sigma_p[si] << "]";
                    first_error = msg.str();
                }
            }
        }
    };

    int nthreads = spec.threads > 0 ? spec.threads
                                    : static_cast<int>(std::thread::hardware_concurrency());
    if (nthreads < 1) nthreads = 1;
    nthreads = std::min<int>(nthreads, static_cast<int>(total));
    std::vector<std::thread> pool;
    for (int t = 1; t < nthreads; ++t) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    if (failed.load()) throw oracle_failure("run_sweep: " + first_error);

    SweepResult res;
    res.rows = std::move(rows);
    std::error_code ec;
    std::filesystem::create_directories(spec.out_dir, ec);
    res.csv_path = spec.out_dir + "/sweep.csv";
    detail::write_csv(spec, res.rows, res.csv_path);
    if (spec.plots) res.plot_paths = detail::write_heatmaps(spec, res.rows, spec.out_dir);
    return res;
}

}  // namespace qdr
