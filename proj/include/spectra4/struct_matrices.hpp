#pragma once

// Constant and spectral-parameter dependent 4x4 matrices of the
// quasi-diagonal reduction of the fundamental-matrix equation
//
//     M' = (Lambda(lambda) - 2 p J - q J1) M,   M(0) = 1,
//
// together with a residual check of the identities they satisfy.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "spectra4/potential.hpp"

namespace spectra4 {

using Matrix4 = Eigen::Matrix<Complex, 4, 4>;

enum class ConstantMatrix { omega, U, J, J1, A, A1, B, B1, B2, Q1 };

namespace detail {

inline constexpr Complex kI{0.0, 1.0};

inline Matrix4 make(std::initializer_list<Complex> rows, double scale) {
    Matrix4 m;
    auto it = rows.begin();
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) m(r, c) = scale * *it++;
    return m;
}

inline std::array<Complex, 4> omega_diag() { return {kI, Complex(1, 0), Complex(-1, 0), -kI}; }

}  // namespace detail

inline Matrix4 build_constant(ConstantMatrix which) {
    using detail::kI;
    using detail::make;
    const Complex one(1, 0);
    const Complex zero(0, 0);
    switch (which) {
        case ConstantMatrix::omega: {
            Matrix4 m = Matrix4::Zero();
            const auto w = detail::omega_diag();
            for (int j = 0; j < 4; ++j) m(j, j) = w[j];
            return m;
        }
        case ConstantMatrix::U: {
            // U_{jk} = omega_k^{j-1} / 2
            Matrix4 m;
            const auto w = detail::omega_diag();
            for (int j = 0; j < 4; ++j)
                for (int k = 0; k < 4; ++k) {
                    Complex pw(1, 0);
                    for (int e = 0; e < j; ++e) pw *= w[k];
                    m(j, k) = 0.5 * pw;
                }
            return m;
        }
        case ConstantMatrix::J: {
            Matrix4 m = Matrix4::Zero();
            m(2, 1) = one;
            return m;
        }
        case ConstantMatrix::J1: {
            Matrix4 m = Matrix4::Zero();
            m(3, 0) = one;
            return m;
        }
        case ConstantMatrix::A:
            return make({-kI, -one, one, kI,
                         kI, one, -one, -kI,
                         kI, one, -one, -kI,
                         -kI, -one, one, kI}, 0.25);
        case ConstantMatrix::A1:
            return make({-kI, -kI, -kI, -kI,
                         -one, -one, -one, -one,
                         one, one, one, one,
                         kI, kI, kI, kI}, 0.25);
        case ConstantMatrix::B:
            return make({zero, one + kI, one - kI, one,
                         -one + kI, zero, -one, -one - kI,
                         -one - kI, -one, zero, -one + kI,
                         one, one - kI, one + kI, zero}, 1.0 / 8.0);
        case ConstantMatrix::B1:
            // Entry (3,4) is -2i: the value forced by B + i[B1, omega] = 0.
            return make({zero, -2.0 * one, -2.0 * one, -one,
                         2.0 * kI, zero, kI, 2.0 * kI,
                         -2.0 * kI, -kI, zero, -2.0 * kI,
                         one, 2.0 * one, 2.0 * one, zero}, 1.0 / 16.0);
        case ConstantMatrix::B2:
            return make({kI, kI, kI, zero,
                         one, one, zero, one,
                         -one, zero, -one, -one,
                         zero, -kI, -kI, -kI}, 1.0 / 32.0);
        case ConstantMatrix::Q1: {
            const Matrix4 w = build_constant(ConstantMatrix::omega);
            const Matrix4 a = build_constant(ConstantMatrix::A);
            const Matrix4 b = build_constant(ConstantMatrix::B);
            const Matrix4 b1 = build_constant(ConstantMatrix::B1);
            // The last term is the (2p/z^2 B)(2p'/z^3 B1) cross term of W^{-1}
            // acting on iz*omega; without it the z^-4 coefficient is incomplete.
            return -kI * a * b1 + b * (b - kI * w * b1) + kI * b1 * (a - w * b) +
                   kI * (b * b1 + b1 * b) * w;
        }
    }
    throw std::invalid_argument("unknown constant matrix");
}

/// Companion matrix Lambda(lambda): ones on the superdiagonal, lambda at (4,1).
inline Matrix4 build_lambda(Complex lambda) {
    Matrix4 m = Matrix4::Zero();
    m(0, 1) = m(1, 2) = m(2, 3) = 1.0;
    m(3, 0) = lambda;
    return m;
}

/// Z(z) = diag(1, iz, (iz)^2, (iz)^3).
inline Matrix4 build_z(Complex z) {
    const Complex iz = detail::kI * z;
    Matrix4 m = Matrix4::Zero();
    m(0, 0) = 1.0;
    m(1, 1) = iz;
    m(2, 2) = iz * iz;
    m(3, 3) = iz * iz * iz;
    return m;
}

namespace detail {
inline void require_nonzero(Complex z, const char* what) {
    if (z == Complex{}) throw std::domain_error(std::string(what) + ": z must be nonzero");
}
}  // namespace detail

/// W(t,z) = 1 - 2p/z^2 B - 2p'/z^3 B1, from p = p(t) and ppt = p'(t).
inline Matrix4 build_w(double pt, double ppt, Complex z) {
    detail::require_nonzero(z, "build_w");
    return Matrix4::Identity() - (2.0 * pt / (z * z)) * build_constant(ConstantMatrix::B) -
           (2.0 * ppt / (z * z * z)) * build_constant(ConstantMatrix::B1);
}

/// d/dt W(t,z), from p'(t) and p''(t).
inline Matrix4 build_w_prime(double ppt, double pt_dd, Complex z) {
    detail::require_nonzero(z, "build_w_prime");
    return -(2.0 * ppt / (z * z)) * build_constant(ConstantMatrix::B) -
           (2.0 * pt_dd / (z * z * z)) * build_constant(ConstantMatrix::B1);
}

/// xi(t,z) = omega + p/(2z^2) omega^*.
inline Matrix4 build_xi(double pt, Complex z) {
    detail::require_nonzero(z, "build_xi");
    const Matrix4 w = build_constant(ConstantMatrix::omega);
    return w + (pt / (2.0 * z * z)) * w.adjoint();
}

/// Q0 = i q A1 + 2 p'' B1 + 4i p^2 B2.
inline Matrix4 build_q0(double pt_dd, double p_sq, double qt) {
    using detail::kI;
    return kI * qt * build_constant(ConstantMatrix::A1) + 2.0 * pt_dd * build_constant(ConstantMatrix::B1) +
           4.0 * kI * p_sq * build_constant(ConstantMatrix::B2);
}

/// v(z) = diag(omega_j + p0/(2z^2) conj(omega_j)), the period average of xi.
inline Matrix4 build_v(double p0, Complex z) {
    detail::require_nonzero(z, "build_v");
    Matrix4 m = Matrix4::Zero();
    const auto w = detail::omega_diag();
    for (int j = 0; j < 4; ++j) m(j, j) = w[j] + p0 / (2.0 * z * z) * std::conj(w[j]);
    return m;
}

/// lambda together with its fourth root z on the principal branch,
/// arg z in (-pi/4, pi/4].
struct SpectralParam {
    Complex lambda;
    Complex z;

    static SpectralParam from_lambda(Complex lambda) { return {lambda, std::pow(lambda, 0.25)}; }
    static SpectralParam from_z(Complex z) { return {z * z * z * z, z}; }

    /// z in S = {arg z in [0, pi/4)}.
    bool in_sector() const {
        if (z == Complex{}) return false;
        const double a = std::arg(z);
        return a >= 0.0 && a < kPi / 4.0;
    }
};

inline double max_abs(const Matrix4& m) { return m.cwiseAbs().maxCoeff(); }

struct IdentityCheck {
    std::string name;
    double residual = 0.0;
    bool passed = false;
};

struct IdentityReport {
    std::vector<IdentityCheck> checks;
    double max_residual = 0.0;
    bool all_passed = true;
};

/// Max-entry residuals of the algebraic identities behind the quasi-diagonal
/// form. The conjugation of Lambda by ZU is checked against iz*omega at
/// z in {1, 2, 1 + i/3}.
inline IdentityReport verify_identities(double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    using detail::kI;
    const Matrix4 w = build_constant(ConstantMatrix::omega);
    const Matrix4 u = build_constant(ConstantMatrix::U);
    const Matrix4 j = build_constant(ConstantMatrix::J);
    const Matrix4 j1 = build_constant(ConstantMatrix::J1);
    const Matrix4 a = build_constant(ConstantMatrix::A);
    const Matrix4 a1 = build_constant(ConstantMatrix::A1);
    const Matrix4 b = build_constant(ConstantMatrix::B);
    const Matrix4 b1 = build_constant(ConstantMatrix::B1);
    const Matrix4 b2 = build_constant(ConstantMatrix::B2);
    const Matrix4 u_inv = u.inverse();

    IdentityReport report;
    auto record = [&](std::string name, double r) {
        const bool ok = r <= tol;
        report.checks.push_back({std::move(name), r, ok});
        report.max_residual = std::max(report.max_residual, r);
        report.all_passed = report.all_passed && ok;
    };

    record("U unitary", max_abs(u * u.adjoint() - Matrix4::Identity()));
    record("A = U^-1 J U", max_abs(u_inv * j * u - a));
    record("A1 = -U^-1 J1 U", max_abs(-u_inv * j1 * u - a1));
    for (Complex z : {Complex(1, 0), Complex(2, 0), Complex(1, 1.0 / 3.0)}) {
        const Matrix4 zu = build_z(z) * u;
        const Matrix4 lhs = zu.inverse() * build_lambda(z * z * z * z) * zu;
        char label[96];
        std::snprintf(label, sizeof label, "(ZU)^-1 Lambda ZU = iz omega at z=%g%+gi", z.real(), z.imag());
        record(label, max_abs(lhs - kI * z * w));
    }
    record("[B,omega] + A = omega*/4", max_abs(b * w - w * b + a - w.adjoint() / 4.0));
    record("B + i[B1,omega] = 0", max_abs(b + kI * (b1 * w - w * b1)));
    record("B2 = B omega*/4 - A B", max_abs(b2 - (b * w.adjoint() / 4.0 - a * b)));
    return report;
}

struct QuasiDiagResult {
    double residual = 0.0;  ///< sup over samples of the max-entry norm
    double worst_t = 0.0;
};

/**
 * Remainder of the quasi-diagonal coefficient beyond its z^-4 expansion.
 *
 * Q_exact = W^{-1}(iz omega W - W' + (2ip/z) A W + (iq/z^3) A1 W) - iz xi is
 * the exact perturbation in Phi' = (iz xi + Q) Phi. Returns the supremum over
 * `samples` equispaced t in [0,1) of |Q_exact - Q0/z^3 - 4pp' Q1/z^4|, which
 * decays like |z|^-5. Throws std::domain_error when W(t,z) is singular.
 */
inline QuasiDiagResult quasi_diag_residual(const OperatorSpec& spec, Complex z, int samples = 64) {
    detail::require_nonzero(z, "quasi_diag_residual");
    if (samples < 1) throw std::invalid_argument("samples must be positive");
    using detail::kI;
    const FourierPotential dp = derivative(spec.p(), 1);
    const FourierPotential ddp = derivative(spec.p(), 2);
    const Matrix4 w = build_constant(ConstantMatrix::omega);
    const Matrix4 a = build_constant(ConstantMatrix::A);
    const Matrix4 a1 = build_constant(ConstantMatrix::A1);
    const Matrix4 q1 = build_constant(ConstantMatrix::Q1);
    const Complex z2 = z * z;
    const Complex z3 = z2 * z;
    const Complex z4 = z3 * z;

    QuasiDiagResult out;
    for (int s = 0; s < samples; ++s) {
        const double t = static_cast<double>(s) / samples;
        const double p = evaluate(spec.p(), t);
        const double p1 = evaluate(dp, t);
        const double p2 = evaluate(ddp, t);
        const double q = evaluate(spec.q(), t);
        const Matrix4 wm = build_w(p, p1, z);
        Eigen::PartialPivLU<Matrix4> lu(wm);
        if (!(lu.rcond() > 1e-12))
        {
            char msg[128];
            std::snprintf(msg, sizeof msg, "W(t,z) singular at t = %g, z = %g%+gi", t, z.real(), z.imag());
            throw std::domain_error(msg);
        }
        const Matrix4 rhs = kI * z * w * wm - build_w_prime(p1, p2, z) + (2.0 * kI * p / z) * a * wm +
                            (kI * q / z3) * a1 * wm;
        const Matrix4 q_exact = lu.solve(rhs) - kI * z * build_xi(p, z);
        const Matrix4 rem = q_exact - build_q0(p2, p * p, q) / z3 - (4.0 * p * p1 / z4) * q1;
        const double r = max_abs(rem);
        if (r > out.residual) {
            out.residual = r;
            out.worst_t = t;
        }
    }
    return out;
}

}  // namespace spectra4
