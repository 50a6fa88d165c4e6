#pragma once

// Run configuration: a flat text file with [p], [q] and [run] sections.
//
//   # comment
//   [p]
//   1 = 2.0, 0.0      # m = cos_amp, sin_amp  (sin_amp may be omitted)
//   [q]
//   2 = 1.0
//   [run]
//   n_max = 12
//   engine = galerkin

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "spectra4/potential.hpp"

namespace spectra4 {

class ConfigError : public std::runtime_error {
public:
    ConfigError(int line, const std::string& what, const std::string& source = {})
        : std::runtime_error(format(line, what, source)), line_(line), detail_(what) {}
    int line() const noexcept { return line_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    static std::string format(int line, const std::string& what, const std::string& source) {
        std::string msg = source.empty() ? "" : source + ": ";
        if (line > 0) msg += "line " + std::to_string(line) + ": ";
        return msg + what;
    }
    int line_;
    std::string detail_;
};

enum class Engine { galerkin, monodromy, both };
enum class Format { csv, json };

inline const char* to_string(Engine e) {
    switch (e) {
        case Engine::galerkin: return "galerkin";
        case Engine::monodromy: return "monodromy";
        default: return "both";
    }
}
inline const char* to_string(Format f) { return f == Format::csv ? "csv" : "json"; }

inline std::optional<Engine> parse_engine(std::string_view s) {
    if (s == "galerkin") return Engine::galerkin;
    if (s == "monodromy") return Engine::monodromy;
    if (s == "both") return Engine::both;
    return std::nullopt;
}

inline std::optional<Format> parse_format(std::string_view s) {
    if (s == "csv") return Format::csv;
    if (s == "json") return Format::json;
    return std::nullopt;
}

struct Tolerances {
    double identity = 1e-13;       ///< structural identity residuals
    double quasi_ratio = 4.0;      ///< max/min of residual * z^5 across the z sweep
    double galerkin_rel = 1e-9;    ///< truncation convergence estimate
    double crosscheck_rel = 1e-7;  ///< monodromy vs Galerkin
    double square_rel = 1e-8;      ///< perfect-square deviation
    double z_max = 28.0;           ///< monodromy overflow guard
};

struct RunConfig {
    std::vector<HarmonicTerm> p_terms;
    std::vector<HarmonicTerm> q_terms;
    int n_min = 1;  ///< first index of residual and gap tables
    int n_max = 10;
    int modes = 0;  ///< Galerkin N; 0 = automatic
    Engine engine = Engine::galerkin;
    Tolerances tol;
    std::vector<double> z_values{20.0, 40.0, 80.0};  ///< quasi-diagonal residual sweep
    std::string output;                               ///< empty = stdout
    Format format = Format::csv;

    OperatorSpec spec() const { return {from_harmonics(p_terms), from_harmonics(q_terms)}; }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double parse_double(std::string_view s, int line, const std::string& what) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw ConfigError(line, "cannot parse " + what + " '" + std::string(s) + "' as a number");
    return v;
}

inline int parse_int(std::string_view s, int line, const std::string& what) {
    s = trim(s);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw ConfigError(line, "cannot parse " + what + " '" + std::string(s) + "' as an integer");
    return v;
}

inline std::vector<std::string_view> split_commas(std::string_view s) {
    std::vector<std::string_view> out;
    for (;;) {
        const auto c = s.find(',');
        out.push_back(trim(s.substr(0, c)));
        if (c == std::string_view::npos) break;
        s.remove_prefix(c + 1);
    }
    return out;
}

}  // namespace detail

/// Parses config text. Errors carry the 1-based line number.
inline RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::string section;
    std::set<int> seen_p, seen_q;
    std::set<std::string> seen_keys;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string_view s = raw;
        if (const auto h = s.find('#'); h != std::string_view::npos) s = s.substr(0, h);
        s = detail::trim(s);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw ConfigError(line, "unterminated section header");
            section = std::string(detail::trim(s.substr(1, s.size() - 2)));
            if (section != "p" && section != "q" && section != "run")
                throw ConfigError(line, "unknown section [" + section + "]");
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string_view::npos) throw ConfigError(line, "expected 'key = value'");
        const std::string_view key = detail::trim(s.substr(0, eq));
        const std::string_view value = detail::trim(s.substr(eq + 1));
        if (section.empty()) throw ConfigError(line, "entry outside of any section");

        if (section == "p" || section == "q") {
            const int m = detail::parse_int(key, line, "harmonic index");
            if (m < 0) throw ConfigError(line, "harmonic index must be >= 0, got " + std::to_string(m));
            auto& seen = section == "p" ? seen_p : seen_q;
            if (!seen.insert(m).second)
                throw ConfigError(line, "duplicate harmonic m = " + std::to_string(m) + " in [" + section + "]");
            const auto parts = detail::split_commas(value);
            if (parts.size() > 2) throw ConfigError(line, "expected 'm = cos_amp, sin_amp'");
            HarmonicTerm t{m, detail::parse_double(parts[0], line, "cos_amp"),
                           parts.size() > 1 ? detail::parse_double(parts[1], line, "sin_amp") : 0.0};
            if (section == "q" && m == 0 && t.cos_amp != 0.0)
                throw ConfigError(line, "q must have zero mean (int_0^1 q dt = 0), but m = 0 has cos_amp " +
                                            std::string(parts[0]));
            (section == "p" ? cfg.p_terms : cfg.q_terms).push_back(t);
            continue;
        }

        const std::string k(key);
        if (!seen_keys.insert(k).second) throw ConfigError(line, "duplicate key '" + k + "'");
        if (k == "n_max") {
            cfg.n_max = detail::parse_int(value, line, k);
            if (cfg.n_max < 0) throw ConfigError(line, "n_max must be >= 0");
        } else if (k == "n_min") {
            cfg.n_min = detail::parse_int(value, line, k);
            if (cfg.n_min < 1) throw ConfigError(line, "n_min must be >= 1");
        } else if (k == "modes") {
            cfg.modes = detail::parse_int(value, line, k);
            if (cfg.modes < 0) throw ConfigError(line, "modes must be >= 0 (0 = automatic)");
        } else if (k == "engine") {
            const auto e = parse_engine(value);
            if (!e) throw ConfigError(line, "engine must be galerkin, monodromy or both");
            cfg.engine = *e;
        } else if (k == "format") {
            const auto f = parse_format(value);
            if (!f) throw ConfigError(line, "format must be csv or json");
            cfg.format = *f;
        } else if (k == "output") {
            cfg.output = std::string(value);
        } else if (k == "z_values") {
            cfg.z_values.clear();
            for (auto part : detail::split_commas(value)) {
                const double z = detail::parse_double(part, line, "z value");
                if (!(z > 0.0)) throw ConfigError(line, "z values must be positive");
                cfg.z_values.push_back(z);
            }
        } else {
            static const std::map<std::string, double Tolerances::*> tols{
                {"tol_identity", &Tolerances::identity},       {"tol_quasi_ratio", &Tolerances::quasi_ratio},
                {"tol_galerkin", &Tolerances::galerkin_rel},   {"tol_crosscheck", &Tolerances::crosscheck_rel},
                {"tol_square", &Tolerances::square_rel},       {"z_max", &Tolerances::z_max}};
            const auto it = tols.find(k);
            if (it == tols.end()) throw ConfigError(line, "unknown key '" + k + "' in [run]");
            const double v = detail::parse_double(value, line, k);
            if (!(v > 0.0)) throw ConfigError(line, k + " must be positive");
            cfg.tol.*(it->second) = v;
        }
    }
    if (cfg.n_min > std::max(1, cfg.n_max)) throw ConfigError(0, "n_min exceeds n_max");
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError(0, "cannot open config '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    try {
        return parse_config(ss.str());
    } catch (const ConfigError& e) {
        throw ConfigError(e.line(), e.detail(), path);
    }
}

}  // namespace spectra4
