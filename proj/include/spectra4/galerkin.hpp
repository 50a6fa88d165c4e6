#pragma once

// Fourier truncation of H and of the Hill operator h = -d^2 - p on [0, 2]
// with periodic conditions, in the orthonormal basis e^{i pi k t} / sqrt(2).
// Period-1 coefficients couple only wavenumbers of equal parity, so even k
// (periodic sector) and odd k (antiperiodic sector) are solved separately.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "spectra4/ladder.hpp"
#include "spectra4/parallel.hpp"
#include "spectra4/potential.hpp"

namespace spectra4 {

struct SectorMatrix {
    Sector sector = Sector::periodic;
    int N = 0;
    std::vector<int> wavenumbers;  ///< k for each row, ascending
    Eigen::MatrixXcd entries;
};

namespace detail {

inline std::vector<int> sector_wavenumbers(Sector s, int N) {
    std::vector<int> ks;
    const int first = s == Sector::periodic ? -2 * N : -2 * N + 1;
    for (int k = first; k <= 2 * N; k += 2) ks.push_back(k);
    return ks;
}

inline void require_modes(int N) {
    if (N < 1) throw std::invalid_argument("truncation N must be >= 1");
}

}  // namespace detail

/// H_{jk} = (pi k)^4 delta_{jk} - 2 (pi j)(pi k) p_{(j-k)/2} + q_{(j-k)/2}.
inline SectorMatrix h_matrix(const OperatorSpec& spec, Sector sector, int N) {
    detail::require_modes(N);
    SectorMatrix m{sector, N, detail::sector_wavenumbers(sector, N), {}};
    const auto n = static_cast<Eigen::Index>(m.wavenumbers.size());
    m.entries = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const int j = m.wavenumbers[r];
        for (Eigen::Index c = 0; c < n; ++c) {
            const int k = m.wavenumbers[c];
            const int d = (j - k) / 2;
            Complex v = -2.0 * (kPi * j) * (kPi * k) * spec.p().coeff(d) + spec.q().coeff(d);
            if (j == k) v += std::pow(kPi * k, 4);
            m.entries(r, c) = v;
        }
    }
    return m;
}

/// h_{jk} = (pi k)^2 delta_{jk} - p_{(j-k)/2}.
inline SectorMatrix hill_matrix(const FourierPotential& p, Sector sector, int N) {
    detail::require_modes(N);
    SectorMatrix m{sector, N, detail::sector_wavenumbers(sector, N), {}};
    const auto n = static_cast<Eigen::Index>(m.wavenumbers.size());
    m.entries = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const int j = m.wavenumbers[r];
        for (Eigen::Index c = 0; c < n; ++c) {
            const int k = m.wavenumbers[c];
            Complex v = -p.coeff((j - k) / 2);
            if (j == k) v += (kPi * k) * (kPi * k);
            m.entries(r, c) = v;
        }
    }
    return m;
}

/**
 * Eigenvalues of a sector matrix, ascending.
 *
 * The dense solver has absolute error ~eps * ||H|| ~ eps (pi 2N)^4, far above
 * eps * |lambda| for the low part of the spectrum. Each cluster of nearby
 * eigenvalues is therefore re-solved on its computed invariant subspace with
 * the shift sigma removed, X^*(H - sigma) X, which restores relative accuracy.
 */
inline std::vector<double> sector_eigenvalues(const SectorMatrix& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m.entries);
    if (es.info() != Eigen::Success) throw std::runtime_error("Hermitian eigensolver failed");
    const Eigen::VectorXd raw = es.eigenvalues();
    const Eigen::MatrixXcd& x = es.eigenvectors();
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(raw.size()));
    Eigen::Index i = 0;
    while (i < raw.size()) {
        Eigen::Index j = i + 1;
        while (j < raw.size() && raw[j] - raw[j - 1] < std::max(1.0, 1e-4 * std::abs(raw[j]))) ++j;
        const Eigen::Index len = j - i;
        double sigma = 0.0;
        for (Eigen::Index k = i; k < j; ++k) sigma += raw[k];
        sigma = std::round(sigma / static_cast<double>(len));
        Eigen::MatrixXcd shifted = m.entries;
        shifted.diagonal().array() -= sigma;
        const Eigen::MatrixXcd block = x.middleCols(i, len);
        Eigen::MatrixXcd proj = block.adjoint() * shifted * block;
        proj = 0.5 * (proj + proj.adjoint()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> small(proj, Eigen::EigenvaluesOnly);
        for (Eigen::Index k = 0; k < len; ++k) out.push_back(sigma + small.eigenvalues()[k]);
        i = j;
    }
    std::sort(out.begin(), out.end());
    return out;
}

struct GalerkinOptions {
    int modes = 0;               ///< fixed N; 0 selects N automatically
    int margin = 32;             ///< automatic N = 2 n_max + degree + margin
    double converge_rel = 1e-9;  ///< accepted |lambda(N) - lambda(N/2)| / max(1, |lambda|)
    int max_doublings = 4;
};

struct GalerkinResult {
    EigenLadder ladder;
    int modes = 0;
    double convergence = 0.0;  ///< max over the ladder of |lambda(N) - lambda(N/2)| / max(1, |lambda|)
    bool converged = false;
    std::vector<std::string> errors;
};

namespace detail {

template <class Build>
EigenLadder solve_ladder(Build&& build, int n_max, int N) {
    std::vector<std::vector<double>> vals(2);
    const Sector sectors[2] = {Sector::periodic, Sector::antiperiodic};
    parallel_for(2, [&](std::size_t i) { vals[i] = sector_eigenvalues(build(sectors[i], N)); });
    std::vector<std::pair<double, Sector>> merged;
    for (int i = 0; i < 2; ++i)
        for (double v : vals[static_cast<std::size_t>(i)]) merged.emplace_back(v, sectors[i]);
    return make_ladder(std::move(merged), n_max);
}

inline double ladder_distance(const EigenLadder& a, const EigenLadder& b) {
    double d = 0.0;
    const std::size_t count = std::min(a.entries.size(), b.entries.size());
    for (std::size_t i = 0; i < count; ++i)
        d = std::max(d, std::abs(a.entries[i].value - b.entries[i].value) / std::max(1.0, std::abs(a.entries[i].value)));
    return d;
}

template <class Build>
GalerkinResult converge(Build&& build, int n_max, int degree, const GalerkinOptions& opts) {
    if (n_max < 0) throw std::invalid_argument("n_max must be >= 0");
    GalerkinResult r;
    const int min_modes = std::max(1, (n_max + 1) / 2 + degree);
    int N = opts.modes > 0 ? opts.modes : 2 * n_max + degree + opts.margin;
    if (N < min_modes) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "N = %d too small: need at least %d modes per sector for n_max = %d", N,
                      min_modes, n_max);
        throw std::invalid_argument(buf);
    }
    const int doublings = opts.modes > 0 ? 0 : opts.max_doublings;
    for (int attempt = 0; attempt <= doublings; ++attempt, N *= 2) {
        r.modes = N;
        r.ladder = solve_ladder(build, n_max, N);
        const EigenLadder coarse = solve_ladder(build, n_max, std::max(1, N / 2));
        r.convergence = ladder_distance(r.ladder, coarse);
        // Below about half the needed modes the coarse ladder is too short.
        if (coarse.entries.size() < r.ladder.entries.size()) r.convergence = std::max(r.convergence, 1.0);
        r.converged = r.convergence <= opts.converge_rel;
        if (r.converged) break;
    }
    if (!r.converged) {
        char buf[200];
        std::snprintf(buf, sizeof buf, "truncation not converged at N = %d: estimate %.3g exceeds %.3g", r.modes,
                      r.convergence, opts.converge_rel);
        r.errors.push_back(buf);
    }
    return r;
}

}  // namespace detail

/// Ordered ladder of H up to index n_max with a truncation-convergence
/// estimate from the comparison against N / 2.
inline GalerkinResult spectrum(const OperatorSpec& spec, int n_max, const GalerkinOptions& opts = {}) {
    return detail::converge([&](Sector s, int N) { return h_matrix(spec, s, N); }, n_max, spec.degree(), opts);
}

/// Ordered ladder alpha_0^+ < alpha_1^- <= alpha_1^+ < ... of h = -d^2 - p.
inline GalerkinResult hill_spectrum(const FourierPotential& p, int n_max, const GalerkinOptions& opts = {}) {
    return detail::converge([&](Sector s, int N) { return hill_matrix(p, s, N); }, n_max, p.degree(), opts);
}

}  // namespace spectra4
