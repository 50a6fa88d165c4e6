#pragma once

// Fundamental matrix of f'''' + 2(p f')' + q f = lambda f in the variables
// (f, f', f'', f''' + 2 p f'), the characteristic determinant
// D(tau, lambda) = det(M(1, lambda) - tau), and real root location.
//
// M(1, lambda) has entries of size e^{|lambda|^{1/4}} while the information
// that decides whether lambda is an eigenvalue sits in its O(1) part. The
// interval [0, 1] is therefore split into segments of growth at most ~e, and
// D is evaluated as the determinant of the block-cyclic multiple-shooting
// matrix, which never forms the product explicitly.

#include <Eigen/Dense>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "spectra4/ladder.hpp"
#include "spectra4/parallel.hpp"
#include "spectra4/potential.hpp"

namespace spectra4 {

struct MonodromyOptions {
    double z_max = 28.0;     ///< refuse |lambda|^{1/4} above this
    double rel_tol = 1e-12;  ///< local error control of the integrator
    double abs_tol = 1e-12;
    double max_step = 1e-2;
    int grid_points = 48;       ///< samples of D per root-search window
    int window_expansions = 4;  ///< doublings of the window on bracketing failure
    double merge_rel = 1e-8;    ///< roots closer than this (relative) form a degenerate pair
    double residual_rel = 1e-6; ///< accepted |D(root)| relative to max |D| over the window
};

class MonodromyGuardError : public std::domain_error {
public:
    MonodromyGuardError(double z, double z_max)
        : std::domain_error(message(z, z_max)), z_(z), z_max_(z_max) {}
    double z() const noexcept { return z_; }
    double z_max() const noexcept { return z_max_; }

private:
    static std::string message(double z, double z_max) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "z too large for double-precision monodromy: z = %.6g exceeds z_max = %.6g",
                      z, z_max);
        return buf;
    }
    double z_;
    double z_max_;
};

/// det M(t) at every accepted integration step.
struct LiouvilleTrace {
    std::vector<std::pair<double, double>> samples;

    double max_deviation() const {
        double d = 0.0;
        for (const auto& [t, det] : samples) d = std::max(d, std::abs(det - 1.0));
        return d;
    }
};

/// M(1, lambda) kept as the ordered product of segment propagators, in the
/// balanced variables y = diag(1, s, s^2, s^3)^{-1} (f, f', f'', f''' + 2pf').
struct FactoredMonodromy {
    double lambda = 0.0;
    double scale = 1.0;
    std::vector<Eigen::Matrix4d> segments;

    /// Unscaled M(1, lambda). Loses the O(1) part to rounding once the
    /// entries reach ~1e16 * eps^-1; use char_det for root finding.
    Eigen::Matrix4d product() const {
        Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
        for (const auto& s : segments) m = s * m;
        const Eigen::Vector4d sv(1.0, scale, scale * scale, scale * scale * scale);
        return sv.asDiagonal() * m * sv.cwiseInverse().asDiagonal();
    }

    /// D(tau, lambda) = det(M_k ... M_1 - tau), via the block-cyclic matrix
    ///   [ M_1  -1            ]
    ///   [      M_2  -1       ]
    ///   [ -tau          M_k  ]
    /// whose determinant equals it exactly for 4x4 blocks.
    double char_det(double tau) const {
        const int k = static_cast<int>(segments.size());
        if (k == 1) return (segments[0] - tau * Eigen::Matrix4d::Identity()).determinant();
        Eigen::MatrixXd big = Eigen::MatrixXd::Zero(4 * k, 4 * k);
        for (int i = 0; i < k - 1; ++i) {
            big.block<4, 4>(4 * i, 4 * i) = segments[i];
            big.block<4, 4>(4 * i, 4 * i + 4) = -Eigen::Matrix4d::Identity();
        }
        big.block<4, 4>(4 * (k - 1), 4 * (k - 1)) = segments[k - 1];
        big.block<4, 4>(4 * (k - 1), 0) = -tau * Eigen::Matrix4d::Identity();
        return Eigen::PartialPivLU<Eigen::MatrixXd>(big).determinant();
    }
};

namespace detail {

using State16 = std::array<double, 16>;

inline double quartic_root(double lambda) { return std::pow(std::abs(lambda), 0.25); }

inline double sup_abs(const FourierPotential& f) {
    double s = 0.0;
    for (const auto& c : f.coefficients()) s += std::abs(c);
    return s;
}

/// Coefficient matrix of y' = A(t) y in balanced variables with scale s.
struct ScaledSystem {
    const OperatorSpec* spec;
    double lambda;
    double s;

    void operator()(const State16& x, State16& dxdt, double t) const {
        const double p = evaluate(spec->p(), t);
        const double q = evaluate(spec->q(), t);
        Eigen::Matrix4d a = Eigen::Matrix4d::Zero();
        a(0, 1) = s;
        a(1, 2) = s;
        a(2, 3) = s;
        a(3, 0) = (lambda - q) / (s * s * s);
        a(2, 1) = -2.0 * p / s;
        Eigen::Map<const Eigen::Matrix<double, 4, 4, Eigen::RowMajor>> m(x.data());
        Eigen::Map<Eigen::Matrix<double, 4, 4, Eigen::RowMajor>> out(dxdt.data());
        out = a * m;
    }
};

inline Eigen::Matrix4d to_matrix(const State16& x) {
    return Eigen::Map<const Eigen::Matrix<double, 4, 4, Eigen::RowMajor>>(x.data());
}

inline State16 identity_state() {
    State16 x{};
    for (int i = 0; i < 4; ++i) x[static_cast<std::size_t>(5 * i)] = 1.0;
    return x;
}

/// Number of segments keeping the growth per segment near e.
inline int segment_count(const OperatorSpec& spec, double lambda) {
    const double g = std::max({quartic_root(lambda), std::sqrt(2.0 * sup_abs(spec.p())),
                               std::pow(sup_abs(spec.q()), 0.25)});
    return std::max(1, static_cast<int>(std::ceil(g)));
}

inline void check_guard(double lambda, const MonodromyOptions& opts) {
    const double z = quartic_root(lambda);
    if (z > opts.z_max) throw MonodromyGuardError(z, opts.z_max);
}

/// Propagator over [a, b] starting from the identity. `det_prefix` is det M(a)
/// and is used only to append Liouville samples.
inline Eigen::Matrix4d propagate(const OperatorSpec& spec, double lambda, double s, double a, double b,
                                 const MonodromyOptions& opts, LiouvilleTrace* trace, double det_prefix) {
    namespace odeint = boost::numeric::odeint;
    State16 x = identity_state();
    if (b <= a) return to_matrix(x);
    ScaledSystem sys{&spec, lambda, s};
    auto stepper = odeint::make_controlled(opts.abs_tol, opts.rel_tol, opts.max_step,
                                           odeint::runge_kutta_dopri5<State16>());
    const double dt0 = std::min(opts.max_step, (b - a) / 4.0);
    auto observer = [&](const State16& state, double t) {
        if (trace && t > a) trace->samples.emplace_back(t, det_prefix * to_matrix(state).determinant());
    };
    odeint::integrate_adaptive(stepper, sys, x, a, b, dt0, observer);
    return to_matrix(x);
}

}  // namespace detail

/// Segment factorization of M(1, lambda).
inline FactoredMonodromy factor_monodromy(const OperatorSpec& spec, double lambda, const MonodromyOptions& opts = {},
                                          LiouvilleTrace* trace = nullptr) {
    detail::check_guard(lambda, opts);
    FactoredMonodromy f;
    f.lambda = lambda;
    f.scale = std::max(1.0, detail::quartic_root(lambda));
    const int k = detail::segment_count(spec, lambda);
    double det_prefix = 1.0;
    for (int j = 0; j < k; ++j) {
        const double a = static_cast<double>(j) / k;
        const double b = static_cast<double>(j + 1) / k;
        f.segments.push_back(detail::propagate(spec, lambda, f.scale, a, b, opts, trace, det_prefix));
        det_prefix *= f.segments.back().determinant();
    }
    return f;
}

/// M(t_end, lambda) for t_end in [0, 1]. When `trace` is given, det M(t) is
/// recorded after every accepted step as the product of well-conditioned
/// segment determinants.
inline Eigen::Matrix4d integrate_fundamental(const OperatorSpec& spec, double lambda, double t_end,
                                             const MonodromyOptions& opts = {}, LiouvilleTrace* trace = nullptr) {
    if (!(t_end >= 0.0 && t_end <= 1.0)) throw std::invalid_argument("t_end must lie in [0, 1]");
    detail::check_guard(lambda, opts);
    const double s = std::max(1.0, detail::quartic_root(lambda));
    const int k = detail::segment_count(spec, lambda);
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    double det_prefix = 1.0;
    for (int j = 0; j < k; ++j) {
        const double a = static_cast<double>(j) / k;
        if (a >= t_end) break;
        const double b = std::min(t_end, static_cast<double>(j + 1) / k);
        const Eigen::Matrix4d seg = detail::propagate(spec, lambda, s, a, b, opts, trace, det_prefix);
        det_prefix *= seg.determinant();
        m = seg * m;
    }
    const Eigen::Vector4d sv(1.0, s, s * s, s * s * s);
    return sv.asDiagonal() * m * sv.cwiseInverse().asDiagonal();
}

inline double char_det(const OperatorSpec& spec, double lambda, double tau, const MonodromyOptions& opts = {}) {
    return factor_monodromy(spec, lambda, opts).char_det(tau);
}

struct MonodromySample {
    double lambda = 0.0;
    Eigen::Matrix4d M;
    double d_plus = 0.0;   ///< D(+1, lambda)
    double d_minus = 0.0;  ///< D(-1, lambda)
};

inline MonodromySample sample_monodromy(const OperatorSpec& spec, double lambda, const MonodromyOptions& opts = {}) {
    const FactoredMonodromy f = factor_monodromy(spec, lambda, opts);
    return {lambda, f.product(), f.char_det(1.0), f.char_det(-1.0)};
}

/// Diagnostics of one root search (one index n, one sector).
struct RootSearch {
    int n = 0;
    Sector sector = Sector::periodic;
    double window_lo = 0.0;
    double window_hi = 0.0;
    double d_scale = 0.0;               ///< max |D| over the final window
    std::vector<double> roots;          ///< ascending
    std::vector<double> d_at_roots;
    bool degenerate = false;            ///< double root reported as lambda^- = lambda^+
    int expansions = 0;
    std::string error;
};

struct MonodromyLadder {
    EigenLadder ladder;
    std::vector<RootSearch> searches;
    std::vector<std::string> errors;
    std::vector<int> parity_flags;  ///< n whose located sector differs from the parity of n
};

namespace detail {

struct RootTask {
    int n = 0;
    Sector sector = Sector::periodic;
    double center = 0.0;
    double half_width = 10.0;
    int count = 2;
};

inline std::vector<double> refine_brackets(const std::function<double(double)>& d,
                                           const std::vector<std::pair<double, double>>& brackets) {
    std::vector<double> roots;
    for (auto [a, b] : brackets) {
        const double fa = d(a);
        const double fb = d(b);
        if (fa == 0.0) {
            roots.push_back(a);
            continue;
        }
        if (fb == 0.0) {
            roots.push_back(b);
            continue;
        }
        std::uintmax_t iters = 200;
        auto tol = [](double x, double y) { return std::abs(x - y) <= 1e-13 * std::max(1.0, std::abs(x)); };
        const auto r = boost::math::tools::toms748_solve(d, a, b, fa, fb, tol, iters);
        roots.push_back(0.5 * (r.first + r.second));
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

inline RootSearch search_window(const OperatorSpec& spec, const RootTask& task, const MonodromyOptions& opts) {
    RootSearch out;
    out.n = task.n;
    out.sector = task.sector;
    const double tau = multiplier(task.sector);
    auto d = [&](double lambda) { return factor_monodromy(spec, lambda, opts).char_det(tau); };

    double w = task.half_width;
    for (int attempt = 0; attempt <= opts.window_expansions; ++attempt, w *= 2.0) {
        out.expansions = attempt;
        const double lo = task.center - w;
        const double hi = task.center + w;
        out.window_lo = lo;
        out.window_hi = hi;
        check_guard(std::max(std::abs(lo), std::abs(hi)), opts);

        const int g = std::max(8, opts.grid_points);
        std::vector<double> xs(static_cast<std::size_t>(g + 1));
        std::vector<double> ds(xs.size());
        for (int i = 0; i <= g; ++i) {
            xs[i] = lo + (hi - lo) * i / g;
            ds[i] = d(xs[i]);
        }
        double scale = 0.0;
        for (double v : ds) scale = std::max(scale, std::abs(v));
        out.d_scale = scale;

        std::vector<std::pair<double, double>> brackets;
        for (int i = 0; i < g; ++i)
            if (ds[i] == 0.0 || (ds[i] < 0.0) != (ds[i + 1] < 0.0)) brackets.emplace_back(xs[i], xs[i + 1]);
        auto by_distance = [&](const auto& x, const auto& y) {
            return std::abs(0.5 * (x.first + x.second) - task.center) <
                   std::abs(0.5 * (y.first + y.second) - task.center);
        };
        std::sort(brackets.begin(), brackets.end(), by_distance);

        std::vector<double> roots;
        bool degenerate = false;
        if (static_cast<int>(brackets.size()) >= task.count) {
            brackets.resize(static_cast<std::size_t>(task.count));
            roots = refine_brackets(d, brackets);
        } else if (brackets.empty() && task.count == 2) {
            // D touches zero (closed gap) or the pair falls between samples:
            // look at the extremum of D opposite to its prevailing sign.
            int positives = 0;
            for (double v : ds) positives += v > 0.0;
            const double s = 2 * positives > static_cast<int>(ds.size()) ? 1.0 : -1.0;
            int best = 0;
            for (int i = 1; i <= g; ++i)
                if (s * ds[i] < s * ds[best]) best = i;
            if (best == 0 || best == g) continue;  // extremum at the window edge
            const double a = xs[best - 1];
            const double b = xs[best + 1];
            auto objective = [&](double x) { return s * d(x); };
            const auto [xm, fm] =
                boost::math::tools::brent_find_minima(objective, a, b, std::numeric_limits<double>::digits / 2);
            if (fm < 0.0) {
                roots = refine_brackets(d, {{a, xm}, {xm, b}});
            } else if (std::abs(fm) <= opts.residual_rel * scale) {
                roots = {xm, xm};
                degenerate = true;
            } else {
                continue;
            }
        } else {
            continue;
        }

        if (roots.size() == 2 && roots[1] - roots[0] <= opts.merge_rel * std::max(1.0, std::abs(roots[0]))) {
            const double mid = 0.5 * (roots[0] + roots[1]);
            roots = {mid, mid};
            degenerate = true;
        }
        out.roots = roots;
        out.degenerate = degenerate;
        out.d_at_roots.clear();
        for (double r : roots) out.d_at_roots.push_back(d(r));
        for (double v : out.d_at_roots) {
            if (std::abs(v) > opts.residual_rel * scale) {
                char buf[160];
                std::snprintf(buf, sizeof buf, "n = %d: |D| = %.3g at root exceeds %.1g of window scale %.3g",
                              task.n, std::abs(v), opts.residual_rel, scale);
                out.error = buf;
            }
        }
        return out;
    }
    char buf[200];
    std::snprintf(buf, sizeof buf, "n = %d: no bracket for %d root(s) of D(%+g, .) in [%.10g, %.10g]", task.n,
                  task.count, tau, out.window_lo, out.window_hi);
    out.error = buf;
    return out;
}

}  // namespace detail

/// Default root-search half-width around the seed for index n.
inline double default_window(const OperatorSpec& spec, int n) {
    if (n <= 0) return 10.0;
    const FourierPotential v = add(spec.q(), derivative(spec.p(), 2), -0.5);
    const double pn = kPi * n;
    return std::max(10.0, 0.5 * std::abs(v.coeff(n)) + 5.0 * pn * pn * std::sqrt(l2_norm_sq(spec.p())) / n);
}

/// Center of the default seed: the two-term large-n prediction
/// (pi n)^4 - 2 p0 (pi n)^2 - (||p||^2 - p0^2)/2.
inline double default_seed(const OperatorSpec& spec, int n) {
    const double p0 = mean(spec.p());
    const double pn2 = (kPi * n) * (kPi * n);
    return pn2 * pn2 - 2.0 * p0 * pn2 - 0.5 * (l2_norm_sq(spec.p()) - p0 * p0);
}

/**
 * Real roots of lambda -> D((-1)^n, lambda) for n = 0..n_max.
 *
 * Each index is searched in a window around its seed (the ladder entries for
 * n in `seeds`, or the large-n prediction). With seeds, the sector of the seed
 * entries decides tau, and indices whose sector disagrees with the parity of
 * n are reported in parity_flags. Failures are reported per n, not thrown;
 * only the overflow guard throws, before any work is done.
 */
inline MonodromyLadder locate_eigenvalues(const OperatorSpec& spec, int n_max,
                                          const std::optional<EigenLadder>& seeds = std::nullopt,
                                          const MonodromyOptions& opts = {}) {
    if (n_max < 0) throw std::invalid_argument("n_max must be >= 0");
    std::vector<detail::RootTask> tasks;
    for (int n = 0; n <= n_max; ++n) {
        const double w = default_window(spec, n);
        if (seeds) {
            for (Sector s : {Sector::periodic, Sector::antiperiodic}) {
                std::vector<double> vals;
                for (const auto& e : seeds->entries)
                    if (e.n == n && e.sector == s) vals.push_back(e.value);
                if (vals.empty()) continue;
                const auto [mn, mx] = std::minmax_element(vals.begin(), vals.end());
                tasks.push_back({n, s, 0.5 * (*mn + *mx), std::max(w, 2.0 * (*mx - *mn)),
                                 static_cast<int>(vals.size())});
            }
        } else {
            tasks.push_back({n, expected_sector(n), default_seed(spec, n), w, n == 0 ? 1 : 2});
        }
    }
    for (const auto& t : tasks) detail::check_guard(std::abs(t.center) + t.half_width, opts);

    MonodromyLadder result;
    result.searches.resize(tasks.size());
    parallel_for(tasks.size(), [&](std::size_t i) { result.searches[i] = detail::search_window(spec, tasks[i], opts); });

    for (const auto& s : result.searches) {
        if (!s.error.empty()) result.errors.push_back(s.error);
        if (s.sector != expected_sector(s.n) &&
            (result.parity_flags.empty() || result.parity_flags.back() != s.n))
            result.parity_flags.push_back(s.n);
    }
    // Label: within each n, ascending roots take -, + (a single root at n = 0 is +).
    for (int n = 0; n <= n_max; ++n) {
        std::vector<std::pair<double, Sector>> vals;
        for (const auto& s : result.searches)
            if (s.n == n)
                for (double r : s.roots) vals.emplace_back(r, s.sector);
        std::sort(vals.begin(), vals.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        for (std::size_t i = 0; i < vals.size(); ++i) {
            const Branch b = (n == 0 || (vals.size() == 2 && i == 1)) ? Branch::plus : Branch::minus;
            result.ladder.entries.push_back({n, b, vals[i].second, vals[i].first});
        }
    }
    if (!result.ladder.ordered()) result.errors.push_back("located roots violate the ladder ordering");
    return result;
}

}  // namespace spectra4
