#pragma once

// Command dispatch shared by the CLI and the tests. Every command returns a
// Report; the process exit status is nonzero iff report.ok() is false.

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "spectra4/asymptotics.hpp"
#include "spectra4/config.hpp"
#include "spectra4/galerkin.hpp"
#include "spectra4/monodromy.hpp"
#include "spectra4/report.hpp"
#include "spectra4/struct_matrices.hpp"

namespace spectra4 {

enum class Command { spectrum, monodromy, crosscheck, predict, residuals, gaps, identities, square_check };

inline constexpr std::string_view kCommandNames[] = {"spectrum",  "monodromy", "crosscheck", "predict",
                                                     "residuals", "gaps",      "identities", "square-check"};

inline std::optional<Command> parse_command(std::string_view s) {
    for (std::size_t i = 0; i < std::size(kCommandNames); ++i)
        if (kCommandNames[i] == s) return static_cast<Command>(i);
    return std::nullopt;
}

inline std::string_view to_string(Command c) { return kCommandNames[static_cast<std::size_t>(c)]; }

namespace detail {

inline GalerkinOptions galerkin_options(const RunConfig& cfg) {
    GalerkinOptions o;
    o.modes = cfg.modes;
    o.converge_rel = cfg.tol.galerkin_rel;
    return o;
}

inline MonodromyOptions monodromy_options(const RunConfig& cfg) {
    MonodromyOptions o;
    o.z_max = cfg.tol.z_max;
    return o;
}

inline void append(std::vector<std::string>& to, const std::vector<std::string>& from) {
    to.insert(to.end(), from.begin(), from.end());
}

inline void ladder_rows(Report& r, const EigenLadder& l, const char* engine) {
    for (const auto& e : l.entries)
        r.rows.push_back({static_cast<long long>(e.n), std::string(to_string(e.sector)), std::string(to_string(e.sign)),
                          e.value, std::string(engine)});
}

inline GalerkinResult galerkin_ladder(const OperatorSpec& spec, int n_max, const RunConfig& cfg, Report& r) {
    GalerkinResult g = spectrum(spec, n_max, galerkin_options(cfg));
    append(r.errors, g.errors);
    r.summary.emplace_back("galerkin_modes", static_cast<long long>(g.modes));
    r.summary.emplace_back("galerkin_convergence", g.convergence);
    return g;
}

inline std::optional<MonodromyLadder> monodromy_ladder(const OperatorSpec& spec, int n_max,
                                                       const std::optional<EigenLadder>& seeds, const RunConfig& cfg,
                                                       Report& r) {
    try {
        MonodromyLadder m = locate_eigenvalues(spec, n_max, seeds, monodromy_options(cfg));
        append(r.errors, m.errors);
        std::string flags;
        for (int n : m.parity_flags) flags += (flags.empty() ? "" : " ") + std::to_string(n);
        r.summary.emplace_back("parity_flags", flags);
        return m;
    } catch (const MonodromyGuardError& e) {
        r.errors.push_back(e.what());
        return std::nullopt;
    }
}

inline Report run_spectrum(const RunConfig& cfg, const OperatorSpec& spec) {
    Report r;
    r.columns = {"n", "sector", "sign", "value", "engine"};
    if (cfg.engine != Engine::monodromy) ladder_rows(r, galerkin_ladder(spec, cfg.n_max, cfg, r).ladder, "galerkin");
    if (cfg.engine != Engine::galerkin)
        if (auto m = monodromy_ladder(spec, cfg.n_max, std::nullopt, cfg, r)) ladder_rows(r, m->ladder, "monodromy");
    return r;
}

inline Report run_monodromy(const RunConfig& cfg, const OperatorSpec& spec) {
    Report r;
    r.columns = {"n", "sector", "sign", "value", "d_value", "d_scale", "degenerate"};
    const auto m = monodromy_ladder(spec, cfg.n_max, std::nullopt, cfg, r);
    if (!m) return r;
    for (const auto& s : m->searches)
        for (std::size_t i = 0; i < s.roots.size(); ++i) {
            const Branch b = (s.n == 0 || (s.roots.size() == 2 && i == 1)) ? Branch::plus : Branch::minus;
            r.rows.push_back({static_cast<long long>(s.n), std::string(to_string(s.sector)),
                              std::string(to_string(b)), s.roots[i], s.d_at_roots[i], s.d_scale, s.degenerate});
        }
    // Liouville along the integration at the largest located eigenvalue.
    double lam = 0.0;
    for (const auto& e : m->ladder.entries)
        if (std::abs(e.value) > std::abs(lam)) lam = e.value;
    LiouvilleTrace trace;
    integrate_fundamental(spec, lam, 1.0, monodromy_options(cfg), &trace);
    r.summary.emplace_back("liouville_lambda", lam);
    r.summary.emplace_back("liouville_max_deviation", trace.max_deviation());
    if (trace.max_deviation() > 1e-9) r.failures.push_back("det M(t) deviates from 1 by more than 1e-9");
    return r;
}

inline Report run_crosscheck(const RunConfig& cfg, const OperatorSpec& spec) {
    Report r;
    r.columns = {"n", "sector", "sign", "galerkin", "monodromy", "rel_deviation"};
    const GalerkinResult g = galerkin_ladder(spec, cfg.n_max, cfg, r);
    const auto m = monodromy_ladder(spec, cfg.n_max, g.ladder, cfg, r);
    if (!m) return r;
    double worst = 0.0;
    for (const auto& e : g.ladder.entries) {
        const LadderEntry* o = m->ladder.find(e.n, e.sign);
        if (!o) {
            r.errors.push_back("monodromy ladder lacks n = " + std::to_string(e.n) + " " + to_string(e.sign));
            continue;
        }
        const double dev = std::abs(e.value - o->value) / std::max(1.0, std::abs(e.value));
        worst = std::max(worst, dev);
        r.rows.push_back({static_cast<long long>(e.n), std::string(to_string(e.sector)), std::string(to_string(e.sign)),
                          e.value, o->value, dev});
    }
    r.summary.emplace_back("max_rel_deviation", worst);
    if (worst > cfg.tol.crosscheck_rel) r.failures.push_back("engines disagree beyond tol_crosscheck");
    return r;
}

inline Report run_predict(const RunConfig& cfg, const OperatorSpec& spec) {
    Report r;
    r.columns = {"n", "sector", "sign", "order0", "main", "v_abs", "p_abs"};
    for (int n = 1; n <= cfg.n_max; ++n) {
        const AsymptoticPrediction a = predict(spec, n);
        for (Branch b : {Branch::minus, Branch::plus})
            r.rows.push_back({static_cast<long long>(n), std::string(to_string(expected_sector(n))),
                              std::string(to_string(b)), a.value(PredictionOrder::order0, b),
                              a.value(PredictionOrder::main, b), a.v_abs, a.p_abs});
    }
    return r;
}

inline Report run_residuals(const RunConfig& cfg, const OperatorSpec& spec) {
    Report r;
    r.columns = {"n", "sector", "sign", "value", "prediction", "residual", "residual_n_half", "residual_n_three_half",
                 "below_floor", "swapped"};
    const GalerkinResult g = galerkin_ladder(spec, cfg.n_max, cfg, r);
    const ResidualTable t = residual_table(g.ladder, spec, cfg.n_min, cfg.n_max);
    append(r.errors, t.errors);
    std::vector<std::pair<double, double>> fit;
    int floored = 0;
    for (const auto& row : t.rows) {
        r.rows.push_back({static_cast<long long>(row.n), std::string(to_string(expected_sector(row.n))),
                          std::string(to_string(row.sign)), row.lambda, row.prediction, row.residual, row.scaled_half,
                          row.scaled_three_half, row.below_floor, row.swapped});
        if (row.below_floor)
            ++floored;
        else
            fit.emplace_back(row.n, row.residual);
    }
    const DecayFit f = decay_fit(fit);
    r.summary.emplace_back("decay_slope", f.slope);
    r.summary.emplace_back("decay_points", static_cast<long long>(f.used));
    r.summary.emplace_back("decay_indeterminate", f.indeterminate);
    r.summary.emplace_back("below_floor_rows", static_cast<long long>(floored));
    return r;
}

inline Report run_gaps(const RunConfig& cfg, const OperatorSpec& spec) {
    Report r;
    r.columns = {"n", "sector", "gap", "correct", "erovenko", "verdict", "discriminating"};
    const GalerkinResult g = galerkin_ladder(spec, cfg.n_max, cfg, r);
    const GapTable t = gap_table(g.ladder, spec, cfg.n_min, cfg.n_max);
    append(r.errors, t.errors);
    long long against = 0;
    for (const auto& row : t.rows) {
        r.rows.push_back({static_cast<long long>(row.n), std::string(to_string(expected_sector(row.n))), row.gap,
                          row.correct, row.erovenko, std::string(to_string(row.verdict)), row.discriminating});
        if (row.discriminating && row.verdict == GapVerdict::erovenko_formula) ++against;
    }
    r.summary.emplace_back("rows_siding_with_erovenko", against);
    if (against > 0) r.failures.push_back("measured gap sides with the competing formula");
    return r;
}

inline Report run_identities(const RunConfig& cfg, const OperatorSpec& spec) {
    Report r;
    r.columns = {"check", "z", "residual", "residual_z5", "passed"};
    const IdentityReport id = verify_identities(cfg.tol.identity);
    for (const auto& c : id.checks)
        r.rows.push_back({c.name, std::numeric_limits<double>::quiet_NaN(), c.residual,
                          std::numeric_limits<double>::quiet_NaN(), c.passed});
    if (!id.all_passed) r.failures.push_back("structural identity residual exceeds tol_identity");
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (double z : cfg.z_values) {
        try {
            const double res = quasi_diag_residual(spec, Complex(z, 0.0)).residual;
            const double scaled = res * std::pow(z, 5);
            lo = std::min(lo, scaled);
            hi = std::max(hi, scaled);
            r.rows.push_back({std::string("quasi-diagonal remainder"), z, res, scaled, true});
        } catch (const std::domain_error& e) {
            r.errors.push_back(e.what());
        }
    }
    // Zero remainder everywhere (p = q = 0) is a pass; otherwise compare spread.
    const double ratio = hi == 0.0 ? 1.0 : hi / lo;
    r.summary.emplace_back("max_identity_residual", id.max_residual);
    r.summary.emplace_back("quasi_z5_ratio", ratio);
    if (ratio >= cfg.tol.quasi_ratio) {
        r.failures.push_back("residual * z^5 not bounded across the z sweep");
        for (auto& row : r.rows)
            if (std::get<std::string>(row[0]) == "quasi-diagonal remainder") row[4] = false;
    }
    return r;
}

inline Report run_square_check(const RunConfig& cfg, const OperatorSpec& spec) {
    Report r;
    r.columns = {"n", "sign", "value", "from_hill", "rel_deviation"};
    const SquareCheck c = perfect_square_check(spec.p(), cfg.n_max, galerkin_options(cfg));
    append(r.errors, c.errors);
    for (const auto& row : c.rows)
        r.rows.push_back({static_cast<long long>(row.n), std::string(to_string(row.sign)), row.lambda, row.from_hill,
                          row.deviation});
    r.summary.emplace_back("galerkin_modes", static_cast<long long>(c.modes));
    r.summary.emplace_back("max_rel_deviation", c.max_deviation);
    if (c.max_deviation > cfg.tol.square_rel) r.failures.push_back("perfect-square deviation exceeds tol_square");
    return r;
}

}  // namespace detail

/// Runs one command. Numerical failures inside a command land in
/// report.errors; configuration problems throw before any work is done.
inline Report run(Command cmd, const RunConfig& cfg) {
    const OperatorSpec spec = cfg.spec();
    Report r;
    switch (cmd) {
        case Command::spectrum: r = detail::run_spectrum(cfg, spec); break;
        case Command::monodromy: r = detail::run_monodromy(cfg, spec); break;
        case Command::crosscheck: r = detail::run_crosscheck(cfg, spec); break;
        case Command::predict: r = detail::run_predict(cfg, spec); break;
        case Command::residuals: r = detail::run_residuals(cfg, spec); break;
        case Command::gaps: r = detail::run_gaps(cfg, spec); break;
        case Command::identities: r = detail::run_identities(cfg, spec); break;
        case Command::square_check: r = detail::run_square_check(cfg, spec); break;
    }
    r.command = std::string(to_string(cmd));
    return r;
}

}  // namespace spectra4
