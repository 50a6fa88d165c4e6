#pragma once

// Real 1-periodic coefficient functions stored as finite Fourier series on
// the harmonics e^{i 2 pi m t}, and the operator H = d^4 + 2 d p d + q built
// from a pair of them.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <numbers>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace spectra4 {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// One real harmonic: cos_amp * cos(2 pi m t) + sin_amp * sin(2 pi m t).
struct HarmonicTerm {
    int m = 0;
    double cos_amp = 0.0;
    double sin_amp = 0.0;
};

class DuplicateHarmonic : public std::invalid_argument {
public:
    explicit DuplicateHarmonic(int m)
        : std::invalid_argument("duplicate harmonic m = " + std::to_string(m)), m_(m) {}
    int harmonic() const noexcept { return m_; }

private:
    int m_;
};

/**
 * Trigonometric polynomial f(t) = sum_{|m| <= degree} c_m e^{i 2 pi m t}.
 *
 * The reality condition c_{-m} = conj(c_m) is enforced on construction, so
 * every instance represents a real function. Instances are immutable.
 */
class FourierPotential {
public:
    FourierPotential() : coeffs_(1, Complex{}) {}

    /// Builds from coefficients c_{-d}, ..., c_d. Rejects input violating
    /// reality by more than 1e-12 of the largest amplitude; the stored
    /// coefficients are then symmetrized exactly.
    static FourierPotential from_coefficients(std::vector<Complex> coeffs) {
        if (coeffs.empty() || coeffs.size() % 2 == 0)
            throw std::invalid_argument("coefficient list must have odd length 2*degree+1");
        const int d = static_cast<int>(coeffs.size() / 2);
        double amax = 0.0;
        for (const auto& c : coeffs) amax = std::max(amax, std::abs(c));
        const double tol = 1e-12 * std::max(1.0, amax);
        for (int m = 0; m <= d; ++m) {
            const Complex& pos = coeffs[d + m];
            const Complex& neg = coeffs[d - m];
            if (std::abs(pos - std::conj(neg)) > tol)
                throw std::invalid_argument("coefficients violate reality at m = " + std::to_string(m));
        }
        FourierPotential f;
        f.coeffs_.assign(coeffs.size(), Complex{});
        f.coeffs_[d] = Complex(coeffs[d].real(), 0.0);
        for (int m = 1; m <= d; ++m) {
            const Complex avg = 0.5 * (coeffs[d + m] + std::conj(coeffs[d - m]));
            f.coeffs_[d + m] = avg;
            f.coeffs_[d - m] = std::conj(avg);
        }
        f.trim();
        return f;
    }

    static FourierPotential constant(double c) {
        FourierPotential f;
        f.coeffs_[0] = c;
        return f;
    }

    int degree() const noexcept { return static_cast<int>(coeffs_.size() / 2); }

    /// c_m; zero outside the stored support.
    Complex coeff(int m) const noexcept {
        const int d = degree();
        if (m < -d || m > d) return {};
        return coeffs_[static_cast<std::size_t>(d + m)];
    }

    const std::vector<Complex>& coefficients() const noexcept { return coeffs_; }

    bool is_zero() const noexcept {
        return std::all_of(coeffs_.begin(), coeffs_.end(), [](const Complex& c) { return c == Complex{}; });
    }

    double max_amplitude() const noexcept {
        double a = 0.0;
        for (const auto& c : coeffs_) a = std::max(a, std::abs(c));
        return a;
    }

private:
    void trim() {
        int d = degree();
        while (d > 0 && coeffs_.front() == Complex{} && coeffs_.back() == Complex{}) {
            coeffs_.erase(coeffs_.begin());
            coeffs_.pop_back();
            --d;
        }
    }

    std::vector<Complex> coeffs_;  // index d + m holds c_m
};

/// Sum of cos/sin harmonics. Each m must be non-negative and appear once.
inline FourierPotential from_harmonics(const std::vector<HarmonicTerm>& terms) {
    std::set<int> seen;
    int d = 0;
    for (const auto& t : terms) {
        if (t.m < 0) throw std::invalid_argument("harmonic index must be >= 0, got " + std::to_string(t.m));
        if (!seen.insert(t.m).second) throw DuplicateHarmonic(t.m);
        d = std::max(d, t.m);
    }
    std::vector<Complex> c(static_cast<std::size_t>(2 * d + 1), Complex{});
    for (const auto& t : terms) {
        if (t.m == 0) {
            c[d] = t.cos_amp;  // sin(0) vanishes
            continue;
        }
        const Complex cm(0.5 * t.cos_amp, -0.5 * t.sin_amp);
        c[d + t.m] = cm;
        c[d - t.m] = std::conj(cm);
    }
    return FourierPotential::from_coefficients(std::move(c));
}

inline double evaluate(const FourierPotential& f, double t) {
    double acc = f.coeff(0).real();
    for (int m = 1; m <= f.degree(); ++m) {
        const double arg = kTwoPi * m * t;
        acc += 2.0 * (f.coeff(m) * Complex(std::cos(arg), std::sin(arg))).real();
    }
    return acc;
}

/// k-th derivative: c_m -> (i 2 pi m)^k c_m.
inline FourierPotential derivative(const FourierPotential& f, int order) {
    if (order < 0) throw std::invalid_argument("derivative order must be >= 0");
    const int d = f.degree();
    std::vector<Complex> c(static_cast<std::size_t>(2 * d + 1));
    for (int m = -d; m <= d; ++m) {
        Complex factor(1.0, 0.0);
        for (int k = 0; k < order; ++k) factor *= Complex(0.0, kTwoPi * m);
        c[d + m] = factor * f.coeff(m);
    }
    return FourierPotential::from_coefficients(std::move(c));
}

inline double mean(const FourierPotential& f) { return f.coeff(0).real(); }

/// Integral of |f|^2 over one period (Parseval).
inline double l2_norm_sq(const FourierPotential& f) {
    double s = 0.0;
    for (const auto& c : f.coefficients()) s += std::norm(c);
    return s;
}

inline FourierPotential add(const FourierPotential& a, const FourierPotential& b, double scale_b = 1.0) {
    const int d = std::max(a.degree(), b.degree());
    std::vector<Complex> c(static_cast<std::size_t>(2 * d + 1));
    for (int m = -d; m <= d; ++m) c[d + m] = a.coeff(m) + scale_b * b.coeff(m);
    return FourierPotential::from_coefficients(std::move(c));
}

inline FourierPotential scale(const FourierPotential& a, double s) {
    return add(FourierPotential{}, a, s);
}

/// Pointwise product, i.e. exact convolution of the coefficient sequences.
inline FourierPotential multiply(const FourierPotential& a, const FourierPotential& b) {
    const int da = a.degree();
    const int db = b.degree();
    const int d = da + db;
    std::vector<Complex> c(static_cast<std::size_t>(2 * d + 1));
    for (int i = -da; i <= da; ++i)
        for (int j = -db; j <= db; ++j) c[d + i + j] += a.coeff(i) * b.coeff(j);
    return FourierPotential::from_coefficients(std::move(c));
}

/**
 * Coefficient pair (p, q) of H = d^4 + 2 d p d + q on the circle of length 2.
 * q must have zero mean.
 */
class OperatorSpec {
public:
    OperatorSpec() = default;
    OperatorSpec(FourierPotential p, FourierPotential q) : p_(std::move(p)), q_(std::move(q)) {
        const double tol = 1e-13 * std::max(1.0, q_.max_amplitude());
        if (std::abs(mean(q_)) > tol)
            throw std::invalid_argument("q must have zero mean (int_0^1 q dt = 0), got mean " +
                                        std::to_string(mean(q_)));
    }

    const FourierPotential& p() const noexcept { return p_; }
    const FourierPotential& q() const noexcept { return q_; }
    int degree() const noexcept { return std::max(p_.degree(), q_.degree()); }

private:
    FourierPotential p_;
    FourierPotential q_;
};

/// V = q - p''/2, i.e. V_m = q_m + 2 pi^2 m^2 p_m.
inline FourierPotential v_potential(const OperatorSpec& spec) {
    return add(spec.q(), derivative(spec.p(), 2), -0.5);
}

/// q = p'' + p^2 - ||p||^2, for which H equals (-d^2 - p)^2 - ||p||^2.
inline FourierPotential perfect_square_q(const FourierPotential& p) {
    FourierPotential q = add(derivative(p, 2), multiply(p, p));
    std::vector<Complex> c = q.coefficients();
    c[static_cast<std::size_t>(q.degree())] = Complex{};  // removes exactly ||p||^2
    return FourierPotential::from_coefficients(std::move(c));
}

}  // namespace spectra4
