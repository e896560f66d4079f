#pragma once

// Plain-text key=value configuration for the sweep front-end.  Values may be
// absolute numbers or symbolic ratios of the carrier ("wc/100", "wp/100",
// "3*sigma_p"); grid axes use  single | v1,v2,... | lin:lo:hi:n | log:lo:hi:n.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qdr/errors.hpp"
#include "qdr/protocols.hpp"

namespace qdr {

struct SweepSpec {
    // Fixed physics.
    double v = 100.0;                  // m/s
    double lambda = 0.06 * M_PI;       // carrier wavelength (m)
    double omega_c = 0.0;              // resolved carrier (rad/s)
    double eps = 0.0;                  // phase-matching bandwidth (rad/s)
    double tail_tol = 1e-10;

    // Grid axes (lexicographic sweep order: eta, nb, c_xi, sigma_p).
    std::vector<double> eta{1.0};
    std::vector<double> nb{1.0};
    std::vector<double> c_xi{4.0, 2.0, 1.0, 0.3, 0.1, 0.03};
    std::vector<double> sigma_p;       // rad/s

    // Output.
    std::string out_dir = ".";
    bool plots = false;
    double audit = 0.0;                // fraction of rows re-checked
    int threads = 0;                   // 0 = hardware concurrency

    double omega_p() const { return 2.0 * omega_c; }
};

struct ConfigResult {
    SweepSpec spec;
    std::vector<std::string> errors;
    bool ok() const { return errors.empty(); }
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline bool parse_number(const std::string& s, double& out) {
    try {
        std::size_t pos = 0;
        out = std::stod(s, &pos);
        return pos == s.size();
    } catch (...) {
        return false;
    }
}

// Resolve "NUM", "SYM", "SYM/NUM", "NUM*SYM" or "SYM*NUM" against the symbol
// table (wc, wp, sigma_p).
inline bool resolve_value(const std::string& raw, const std::map<std::string, double>& symbols,
                          double& out) {
    const std::string s = trim(raw);
    if (parse_number(s, out)) return true;
    auto lookup = [&](const std::string& t, double& v) {
        if (parse_number(t, v)) return true;
        auto it = symbols.find(trim(t));
        if (it == symbols.end()) return false;
        v = it->second;
        return true;
    };
    if (auto pos = s.find('*'); pos != std::string::npos) {
        double a, b;
        if (lookup(s.substr(0, pos), a) && lookup(s.substr(pos + 1), b)) {
            out = a * b;
            return true;
        }
        return false;
    }
    if (auto pos = s.find('/'); pos != std::string::npos) {
        double a, b;
        if (lookup(s.substr(0, pos), a) && lookup(s.substr(pos + 1), b) && b != 0.0) {
            out = a / b;
            return true;
        }
        return false;
    }
    return lookup(s, out);
}

// Axis grammar: "lin:lo:hi:n", "log:lo:hi:n", comma list, or single value.
inline bool resolve_axis(const std::string& raw, const std::map<std::string, double>& symbols,
                         std::vector<double>& out, std::string& err) {
    const std::string s = trim(raw);
    auto split = [](const std::string& str, char sep) {
        std::vector<std::string> parts;
        std::stringstream ss(str);
        std::string item;
        while (std::getline(ss, item, sep)) parts.push_back(item);
        return parts;
    };
    if (s.rfind("lin:", 0) == 0 || s.rfind("log:", 0) == 0) {
        const bool logscale = s[1] == 'o';
        const auto parts = split(s.substr(4), ':');
        double lo, hi, np;
        if (parts.size() != 3 || !resolve_value(parts[0], symbols, lo) ||
            !resolve_value(parts[1], symbols, hi) || !parse_number(parts[2], np) || np < 2) {
            err = "expected " + s.substr(0, 3) + ":lo:hi:n with n >= 2";
            return false;
        }
        if (logscale && (lo <= 0.0 || hi <= 0.0)) {
            err = "log axis needs positive endpoints";
            return false;
        }
        const int n = static_cast<int>(np);
        out.clear();
        for (int i = 0; i < n; ++i) {
            const double t = static_cast<double>(i) / (n - 1);
            out.push_back(logscale ? std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo)))
                                   : lo + t * (hi - lo));
        }
        return true;
    }
    out.clear();
    for (const auto& part : split(s, ',')) {
        double v;
        if (!resolve_value(part, symbols, v)) {
            err = "cannot resolve value '" + trim(part) + "'";
            return false;
        }
        out.push_back(v);
    }
    if (out.empty()) {
        err = "empty axis";
        return false;
    }
    return true;
}

}  // namespace detail

// Parse configuration text.  Unknown keys and out-of-range values are
// aggregated into the error list; the spec is fully resolved with defaults
// when the list is empty.
inline ConfigResult parse_config_text(const std::string& text) {
    ConfigResult res;
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    static const std::vector<std::string> known = {
        "v",      "lambda", "omega_c", "sigma_p", "eps",   "tail_tol", "eta",
        "nb",     "c_xi",   "out_dir", "plots",   "audit", "threads"};
    while (std::getline(in, line)) {
        ++lineno;
        std::string s = detail::trim(line);
        if (auto pos = s.find('#'); pos != std::string::npos) s = detail::trim(s.substr(0, pos));
        if (s.empty()) continue;
        if (s.front() == '[' && s.back() == ']') continue;  // section header
        auto eq = s.find('=');
        if (eq == std::string::npos) {
            res.errors.push_back("line " + std::to_string(lineno) + ": expected key = value");
            continue;
        }
        const std::string key = detail::trim(s.substr(0, eq));
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            res.errors.push_back("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
            continue;
        }
        if (kv.count(key))
            res.errors.push_back("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        kv[key] = detail::trim(s.substr(eq + 1));
    }

    SweepSpec& spec = res.spec;
    std::map<std::string, double> symbols;  // built up as physics resolves

    auto take_scalar = [&](const char* key, double& target) {
        auto it = kv.find(key);
        if (it == kv.end()) return;
        double v;
        if (detail::resolve_value(it->second, symbols, v))
            target = v;
        else
            res.errors.push_back(std::string(key) + ": cannot resolve '" + it->second + "'");
    };

    take_scalar("v", spec.v);
    take_scalar("lambda", spec.lambda);
    if (spec.lambda <= 0.0) res.errors.push_back("lambda: must be positive");
    spec.omega_c = 2.0 * M_PI * c_light / spec.lambda;
    take_scalar("omega_c", spec.omega_c);
    if (spec.omega_c <= 0.0) res.errors.push_back("omega_c: must be positive");
    symbols["wc"] = spec.omega_c;
    symbols["wp"] = 2.0 * spec.omega_c;

    // sigma_p: axis (possibly single-valued); default wp/100.
    spec.sigma_p = {symbols["wp"] / 100.0};
    if (auto it = kv.find("sigma_p"); it != kv.end()) {
        std::string err;
        if (!detail::resolve_axis(it->second, symbols, spec.sigma_p, err))
            res.errors.push_back("sigma_p: " + err);
    }
    for (double sp : spec.sigma_p)
        if (sp <= 0.0) res.errors.push_back("sigma_p: values must be positive");
    symbols["sigma_p"] = spec.sigma_p.front();

    // eps default: 3 sigma_p when sigma_p is fixed, otherwise 3 wp/100.
    spec.eps = 3.0 * (spec.sigma_p.size() == 1 ? spec.sigma_p.front() : symbols["wp"] / 100.0);
    take_scalar("eps", spec.eps);
    if (spec.eps <= 0.0) res.errors.push_back("eps: must be positive");

    take_scalar("tail_tol", spec.tail_tol);
    if (!(spec.tail_tol > 0.0 && spec.tail_tol < 1.0))
        res.errors.push_back("tail_tol: must lie in (0,1)");

    auto take_axis = [&](const char* key, std::vector<double>& target) {
        auto it = kv.find(key);
        if (it == kv.end()) return;
        std::string err;
        if (!detail::resolve_axis(it->second, symbols, target, err))
            res.errors.push_back(std::string(key) + ": " + err);
    };
    take_axis("eta", spec.eta);
    take_axis("nb", spec.nb);
    take_axis("c_xi", spec.c_xi);
    for (double e : spec.eta)
        if (!(e > 0.0 && e <= 1.0)) res.errors.push_back("eta: values must lie in (0,1]");
    for (double b : spec.nb)
        if (b < 0.0) res.errors.push_back("nb: values must be >= 0");
    for (double c : spec.c_xi)
        if (c <= 0.0) res.errors.push_back("c_xi: values must be positive");

    if (auto it = kv.find("out_dir"); it != kv.end()) spec.out_dir = it->second;
    if (auto it = kv.find("plots"); it != kv.end()) {
        if (it->second == "true" || it->second == "1")
            spec.plots = true;
        else if (it->second == "false" || it->second == "0")
            spec.plots = false;
        else
            res.errors.push_back("plots: expected true/false");
    }
    take_scalar("audit", spec.audit);
    if (spec.audit < 0.0 || spec.audit > 1.0) res.errors.push_back("audit: must lie in [0,1]");
    if (auto it = kv.find("threads"); it != kv.end()) {
        double t;
        if (detail::parse_number(it->second, t) && t >= 0 && t == std::floor(t))
            spec.threads = static_cast<int>(t);
        else
            res.errors.push_back("threads: expected a nonnegative integer");
    }
    return res;
}

inline ConfigResult parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        ConfigResult res;
        res.errors.push_back("cannot open config file: " + path);
        return res;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

// Physics and grid content only (no output plumbing): the identity that the
// result CSV is a deterministic function of.
inline std::string spec_fingerprint(const SweepSpec& spec) {
    std::ostringstream out;
    out.precision(17);
    out << spec.v << '|' << spec.omega_c << '|' << spec.eps << '|' << spec.tail_tol;
    for (const auto* axis : {&spec.eta, &spec.nb, &spec.c_xi, &spec.sigma_p}) {
        out << '|';
        for (double v : *axis) out << v << ',';
    }
    return out.str();
}

// Echo every resolved value as key = value lines.
inline std::string echo_spec(const SweepSpec& spec) {
    std::ostringstream out;
    out.precision(17);
    auto axis = [&](const char* key, const std::vector<double>& vals) {
        out << key << " = ";
        for (std::size_t i = 0; i < vals.size(); ++i) out << (i ? "," : "") << vals[i];
        out << "\n";
    };
    out << "v = " << spec.v << "\n";
    out << "lambda = " << spec.lambda << "\n";
    out << "omega_c = " << spec.omega_c << "\n";
    axis("sigma_p", spec.sigma_p);
    out << "eps = " << spec.eps << "\n";
    out << "tail_tol = " << spec.tail_tol << "\n";
    axis("eta", spec.eta);
    axis("nb", spec.nb);
    axis("c_xi", spec.c_xi);
    out << "out_dir = " << spec.out_dir << "\n";
    out << "plots = " << (spec.plots ? "true" : "false") << "\n";
    out << "audit = " << spec.audit << "\n";
    out << "threads = " << spec.threads << "\n";
    return out.str();
}

}  // namespace qdr
