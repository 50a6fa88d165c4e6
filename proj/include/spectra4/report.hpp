#pragma once

// Tabular reports: CSV with the resolved config echoed as '#' comments, or
// JSON {config, rows, errors, summary}. Reals are written with 17 significant
// digits so that reports are byte-stable for identical input.

#include <json.hpp>

#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "spectra4/config.hpp"

namespace spectra4 {

using Cell = std::variant<long long, double, std::string, bool>;

struct Report {
    std::string command;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    std::vector<std::string> errors;
    std::vector<std::pair<std::string, Cell>> summary;
    std::vector<std::string> failures;  ///< failed checks; nonzero exit iff non-empty or errors

    bool ok() const { return errors.empty() && failures.empty(); }
};

inline std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

inline std::string format_cell(const Cell& c) {
    struct V {
        std::string operator()(long long v) const { return std::to_string(v); }
        std::string operator()(double v) const { return format_real(v); }
        std::string operator()(bool v) const { return v ? "true" : "false"; }
        std::string operator()(const std::string& s) const {
            if (s.find_first_of(",\"\n") == std::string::npos) return s;
            std::string q = "\"";
            for (char ch : s) {
                if (ch == '"') q += '"';
                q += ch;
            }
            return q + '"';
        }
    };
    return std::visit(V{}, c);
}

/// The resolved config in its own text format, every default filled in.
inline std::vector<std::string> config_lines(const RunConfig& cfg) {
    std::vector<std::string> out;
    auto terms = [&](const char* name, const std::vector<HarmonicTerm>& ts) {
        out.push_back(std::string("[") + name + "]");
        for (const auto& t : ts)
            out.push_back(std::to_string(t.m) + " = " + format_real(t.cos_amp) + ", " + format_real(t.sin_amp));
    };
    terms("p", cfg.p_terms);
    terms("q", cfg.q_terms);
    out.push_back("[run]");
    out.push_back("n_min = " + std::to_string(cfg.n_min));
    out.push_back("n_max = " + std::to_string(cfg.n_max));
    out.push_back("modes = " + std::to_string(cfg.modes));
    out.push_back(std::string("engine = ") + to_string(cfg.engine));
    std::string zs;
    for (double z : cfg.z_values) zs += (zs.empty() ? "" : ", ") + format_real(z);
    out.push_back("z_values = " + zs);
    out.push_back("tol_identity = " + format_real(cfg.tol.identity));
    out.push_back("tol_quasi_ratio = " + format_real(cfg.tol.quasi_ratio));
    out.push_back("tol_galerkin = " + format_real(cfg.tol.galerkin_rel));
    out.push_back("tol_crosscheck = " + format_real(cfg.tol.crosscheck_rel));
    out.push_back("tol_square = " + format_real(cfg.tol.square_rel));
    out.push_back("z_max = " + format_real(cfg.tol.z_max));
    return out;
}

inline nlohmann::ordered_json config_json(const RunConfig& cfg) {
    using nlohmann::ordered_json;
    auto terms = [](const std::vector<HarmonicTerm>& ts) {
        ordered_json a = ordered_json::array();
        for (const auto& t : ts) a.push_back({{"m", t.m}, {"cos_amp", t.cos_amp}, {"sin_amp", t.sin_amp}});
        return a;
    };
    ordered_json j;
    j["p"] = terms(cfg.p_terms);
    j["q"] = terms(cfg.q_terms);
    j["run"] = {{"n_min", cfg.n_min},
                {"n_max", cfg.n_max},
                {"modes", cfg.modes},
                {"engine", to_string(cfg.engine)},
                {"z_values", cfg.z_values},
                {"tol_identity", cfg.tol.identity},
                {"tol_quasi_ratio", cfg.tol.quasi_ratio},
                {"tol_galerkin", cfg.tol.galerkin_rel},
                {"tol_crosscheck", cfg.tol.crosscheck_rel},
                {"tol_square", cfg.tol.square_rel},
                {"z_max", cfg.tol.z_max}};
    return j;
}

inline void write_csv(std::ostream& os, const Report& r, const RunConfig& cfg) {
    os << "# spectra4 " << r.command << '\n';
    for (const auto& l : config_lines(cfg)) os << "# " << l << '\n';
    for (std::size_t i = 0; i < r.columns.size(); ++i) os << (i ? "," : "") << r.columns[i];
    os << '\n';
    for (const auto& row : r.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_cell(row[i]);
        os << '\n';
    }
    for (const auto& [k, v] : r.summary) os << "# summary " << k << " = " << format_cell(v) << '\n';
    for (const auto& e : r.errors) os << "# error " << e << '\n';
    for (const auto& f : r.failures) os << "# failed " << f << '\n';
}

inline nlohmann::ordered_json cell_json(const Cell& c) {
    return std::visit([](const auto& v) { return nlohmann::ordered_json(v); }, c);
}

inline void write_json(std::ostream& os, const Report& r, const RunConfig& cfg) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["command"] = r.command;
    j["config"] = config_json(cfg);
    j["columns"] = r.columns;
    ordered_json rows = ordered_json::array();
    for (const auto& row : r.rows) {
        ordered_json o = ordered_json::object();
        for (std::size_t i = 0; i < row.size() && i < r.columns.size(); ++i) o[r.columns[i]] = cell_json(row[i]);
        rows.push_back(std::move(o));
    }
    j["rows"] = std::move(rows);
    j["errors"] = r.errors;
    ordered_json s = ordered_json::object();
    for (const auto& [k, v] : r.summary) s[k] = cell_json(v);
    s["failed_checks"] = r.failures;
    s["ok"] = r.ok();
    j["summary"] = std::move(s);
    os << j.dump(2) << '\n';
}

inline void write_report(std::ostream& os, const Report& r, const RunConfig& cfg) {
    if (cfg.format == Format::json)
        write_json(os, r, cfg);
    else
        write_csv(os, r, cfg);
}

}  // namespace spectra4
