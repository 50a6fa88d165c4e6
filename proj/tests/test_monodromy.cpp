#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "spectra4/galerkin.hpp"
#include "spectra4/monodromy.hpp"

using namespace spectra4;

namespace {

double pi4(int n) { return std::pow(kPi * n, 4); }

// M(1) for f'''' + 2c f'' = lambda f from the characteristic roots
// r^4 + 2c r^2 - lambda = 0; a solution e^{rt} has state (1, r, r^2, r^3 + 2cr).
Eigen::Matrix4d constant_p_monodromy(double c, double lambda) {
    using C = std::complex<double>;
    const C disc = std::sqrt(C(c * c + lambda, 0.0));
    const C s1 = -c + disc, s2 = -c - disc;  // r^2
    const C roots[4] = {std::sqrt(s1), -std::sqrt(s1), std::sqrt(s2), -std::sqrt(s2)};
    Eigen::Matrix4cd y, e = Eigen::Matrix4cd::Zero();
    for (int k = 0; k < 4; ++k) {
        const C r = roots[k];
        y(0, k) = 1.0;
        y(1, k) = r;
        y(2, k) = r * r;
        y(3, k) = r * r * r + 2.0 * c * r;
        e(k, k) = std::exp(r);
    }
    return (y * e * y.inverse()).real();
}

double window_scale(const OperatorSpec& spec, double lambda, double tau) {
    double s = 0.0;
    for (int i = -10; i <= 10; ++i) s = std::max(s, std::abs(char_det(spec, lambda + i, tau)));
    return s;
}

}  // namespace

TEST(Fundamental, ZeroLambdaIsExponentialOfShift) {
    const Eigen::Matrix4d m = integrate_fundamental(OperatorSpec{}, 0.0, 1.0);
    const double fact[4] = {1.0, 1.0, 2.0, 6.0};
    for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k) EXPECT_NEAR(m(j, k), k >= j ? 1.0 / fact[k - j] : 0.0, 1e-12);
}

TEST(Fundamental, FreeMultipliers) {
    const double z = 2.0;
    const Eigen::Matrix4d m = integrate_fundamental(OperatorSpec{}, std::pow(z, 4), 1.0);
    Eigen::EigenSolver<Eigen::Matrix4d> es(m);
    std::vector<std::complex<double>> got(es.eigenvalues().data(), es.eigenvalues().data() + 4);
    const std::complex<double> want[4] = {std::exp(-z), std::exp(z), std::exp(std::complex<double>(0, z)),
                                          std::exp(std::complex<double>(0, -z))};
    for (const auto& w : want) {
        double best = 1e300;
        for (const auto& g : got) best = std::min(best, std::abs(g - w));
        EXPECT_LT(best, 1e-9) << w;
    }
}

TEST(Fundamental, ConstantPMatchesQuarticRoots) {
    for (double c : {3.0, -2.0}) {
        for (double lambda : {50.0, -20.0, 700.0}) {
            const OperatorSpec spec(FourierPotential::constant(c), FourierPotential{});
            const Eigen::Matrix4d got = integrate_fundamental(spec, lambda, 1.0);
            const Eigen::Matrix4d want = constant_p_monodromy(c, lambda);
            EXPECT_LT((got - want).cwiseAbs().maxCoeff(), 1e-9 * want.cwiseAbs().maxCoeff())
                << "c=" << c << " lambda=" << lambda;
        }
    }
}

TEST(Fundamental, PartialIntervalAndArguments) {
    const Eigen::Matrix4d m0 = integrate_fundamental(OperatorSpec{}, 5.0, 0.0);
    EXPECT_EQ((m0 - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_THROW(integrate_fundamental(OperatorSpec{}, 5.0, 1.5), std::invalid_argument);
    EXPECT_THROW(integrate_fundamental(OperatorSpec{}, 5.0, -0.1), std::invalid_argument);
}

TEST(Fundamental, GuardNamesZmax) {
    try {
        integrate_fundamental(OperatorSpec{}, std::pow(30.0, 4), 1.0);
        FAIL() << "guard not tripped";
    } catch (const MonodromyGuardError& e) {
        EXPECT_NE(std::string(e.what()).find("z too large for double-precision monodromy"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("z_max = 28"), std::string::npos);
        EXPECT_DOUBLE_EQ(e.z_max(), 28.0);
    }
    MonodromyOptions strict;
    strict.z_max = 25.0;
    EXPECT_THROW(integrate_fundamental(OperatorSpec{}, std::pow(26.0, 4), 1.0, strict), MonodromyGuardError);
}

TEST(Liouville, DeterminantStaysOneAlongIntegration) {
    const OperatorSpec spec(from_harmonics({{1, 1.0, 0.0}}), from_harmonics({{2, 0.0, 1.0}}));
    const double big = std::pow(4.0 * kPi, 4);
    for (double lambda : {-big, -1000.0, 0.0, 37.0, big}) {
        LiouvilleTrace trace;
        integrate_fundamental(spec, lambda, 1.0, {}, &trace);
        EXPECT_GT(trace.samples.size(), 50u);
        EXPECT_LE(trace.max_deviation(), 1e-9) << "lambda " << lambda;
    }
}

TEST(CharDet, FreeRootsAtPiNToTheFourth) {
    for (int n = 1; n <= 4; ++n) {
        const double tau = n % 2 ? -1.0 : 1.0;
        const double scale = window_scale(OperatorSpec{}, pi4(n), tau);
        EXPECT_LE(std::abs(char_det(OperatorSpec{}, pi4(n), tau)), 1e-8 * scale) << n;
    }
    EXPECT_NEAR(char_det(OperatorSpec{}, 0.0, 1.0), 0.0, 1e-12);
}

TEST(CharDet, MultiplicityFourAtShiftedExample) {
    // (-d^2 - 10 pi^2)^2 = H(p = 10 pi^2) + 100 pi^4, whose 36 pi^4 lands at -64 pi^4
    const OperatorSpec spec(FourierPotential::constant(10.0 * kPi * kPi), FourierPotential{});
    const double l0 = -64.0 * pi4(1);
    const double scale = window_scale(spec, l0, 1.0);
    EXPECT_LE(std::abs(char_det(spec, l0, 1.0)), 1e-12 * scale);
    // a root of multiplicity 4 makes D(l0 + h) ~ h^4
    for (double h : {1.0, 2.0, 4.0}) {
        const double ratio = char_det(spec, l0 + 2.0 * h, 1.0) / char_det(spec, l0 + h, 1.0);
        EXPECT_NEAR(ratio, 16.0, 0.05) << h;
        const double mirror = char_det(spec, l0 - 2.0 * h, 1.0) / char_det(spec, l0 - h, 1.0);
        EXPECT_NEAR(mirror, 16.0, 0.05) << h;
    }
}

TEST(CharDet, QuarticInTauWithUnitEnds) {
    const OperatorSpec spec(from_harmonics({{1, 1.0, 0.0}}), from_harmonics({{2, 0.0, 1.0}}));
    for (double lambda : {-300.0, 12.0, 900.0}) {
        const FactoredMonodromy f = factor_monodromy(spec, lambda);
        // Newton form through tau = 0..4, checked against a sixth point.
        const double taus[6] = {0, 1, 2, 3, 4, -1.5};
        double d[5];
        for (int i = 0; i < 5; ++i) d[i] = f.char_det(taus[i]);
        // fourth finite difference / 4! is the leading coefficient
        const double lead = (d[4] - 4 * d[3] + 6 * d[2] - 4 * d[1] + d[0]) / 24.0;
        const double scale = std::max({std::abs(d[0]), std::abs(d[4]), 1.0});
        EXPECT_NEAR(lead, 1.0, 1e-8 * scale);
        EXPECT_NEAR(d[0], 1.0, 1e-9 * scale);  // det M
        // Lagrange interpolation at tau = -1.5
        double interp = 0.0;
        for (int i = 0; i < 5; ++i) {
            double w = 1.0;
            for (int j = 0; j < 5; ++j)
                if (j != i) w *= (taus[5] - taus[j]) / (taus[i] - taus[j]);
            interp += w * d[i];
        }
        EXPECT_NEAR(interp, f.char_det(taus[5]), 1e-8 * scale);
    }
}

TEST(CharDet, SegmentedMatchesProductAtSmallLambda) {
    const OperatorSpec spec(from_harmonics({{1, 1.0, 0.0}}), from_harmonics({{2, 0.0, 1.0}}));
    const FactoredMonodromy f = factor_monodromy(spec, 80.0);
    ASSERT_GT(f.segments.size(), 1u);
    const Eigen::Matrix4d m = f.product();
    for (double tau : {1.0, -1.0, 0.3})
        EXPECT_NEAR(f.char_det(tau), (m - tau * Eigen::Matrix4d::Identity()).determinant(), 1e-9);
}

TEST(Sample, CarriesBothDeterminants) {
    const MonodromySample s = sample_monodromy(OperatorSpec{}, 0.0);
    EXPECT_NEAR(s.d_plus, 0.0, 1e-12);
    EXPECT_NEAR(s.d_minus, 16.0, 1e-10);  // unipotent M: det(M + 1) = 2^4
    EXPECT_NEAR(s.M.determinant(), 1.0, 1e-12);
}

TEST(Locate, FreeOperator) {
    const MonodromyLadder r = locate_eigenvalues(OperatorSpec{}, 3);
    EXPECT_TRUE(r.errors.empty());
    ASSERT_EQ(r.ladder.entries.size(), 7u);
    EXPECT_NEAR(r.ladder.entries[0].value, 0.0, 1e-8);
    // every n >= 1 is a double root of D, located only to about sqrt(eps)
    for (const auto& e : r.ladder.entries) {
        EXPECT_NEAR(e.value, pi4(e.n), 1e-7 * std::max(1.0, pi4(e.n)));
        EXPECT_EQ(e.sector, expected_sector(e.n));
    }
}

TEST(Locate, ConstantP) {
    const double c = 1.7;
    const OperatorSpec spec(FourierPotential::constant(c), FourierPotential{});
    const MonodromyLadder r = locate_eigenvalues(spec, 5);
    EXPECT_TRUE(r.errors.empty());
    for (const auto& e : r.ladder.entries) {
        const double want = pi4(e.n) - 2.0 * c * std::pow(kPi * e.n, 2);
        EXPECT_NEAR(e.value, want, 1e-8 * std::max(1.0, std::abs(want))) << e.n;
    }
}

TEST(Locate, AgreesWithGalerkin) {
    const OperatorSpec spec(from_harmonics({{1, 2.0, 0.0}}), FourierPotential{});
    const GalerkinResult g = spectrum(spec, 8);
    const MonodromyLadder m = locate_eigenvalues(spec, 8, g.ladder);
    EXPECT_TRUE(m.errors.empty());
    ASSERT_EQ(m.ladder.entries.size(), g.ladder.entries.size());
    for (std::size_t i = 0; i < g.ladder.entries.size(); ++i) {
        const double a = g.ladder.entries[i].value, b = m.ladder.entries[i].value;
        EXPECT_LE(std::abs(a - b) / std::max(1.0, std::abs(a)), 1e-7) << i;
    }
}

TEST(Locate, RootsAreSmallRelativeToWindow) {
    const OperatorSpec spec(from_harmonics({{1, 1.0, 0.0}}), from_harmonics({{2, 0.0, 1.0}}));
    const MonodromyLadder m = locate_eigenvalues(spec, 6);
    for (const auto& s : m.searches)
        for (double d : s.d_at_roots) EXPECT_LE(std::abs(d), 1e-6 * s.d_scale) << s.n;
}

TEST(Locate, GuardBeforeAnyWork) {
    const OperatorSpec spec(from_harmonics({{1, 2.0, 0.0}}), FourierPotential{});
    EXPECT_THROW(locate_eigenvalues(spec, 50), MonodromyGuardError);
    EXPECT_THROW(locate_eigenvalues(spec, -1), std::invalid_argument);
}

TEST(Locate, DegeneratePairIsMerged) {
    // p = 2 cos 2 pi t has V supported on |m| = 1, so for n >= 2 the pairs are
    // split far below 1e-8 |lambda| and must come back equal.
    const OperatorSpec spec(from_harmonics({{1, 2.0, 0.0}}), FourierPotential{});
    const MonodromyLadder m = locate_eigenvalues(spec, 6);
    const auto* lo = m.ladder.find(6, Branch::minus);
    const auto* hi = m.ladder.find(6, Branch::plus);
    ASSERT_TRUE(lo && hi);
    EXPECT_EQ(lo->value, hi->value);
}

TEST(Locate, IndependentOfThreadCount) {
    const OperatorSpec spec(from_harmonics({{1, 1.0, 0.0}}), from_harmonics({{2, 0.0, 1.0}}));
    setenv("SPECTRA4_THREADS", "1", 1);
    const MonodromyLadder a = locate_eigenvalues(spec, 5);
    setenv("SPECTRA4_THREADS", "4", 1);
    const MonodromyLadder b = locate_eigenvalues(spec, 5);
    unsetenv("SPECTRA4_THREADS");
    ASSERT_EQ(a.ladder.entries.size(), b.ladder.entries.size());
    for (std::size_t i = 0; i < a.ladder.entries.size(); ++i)
        EXPECT_EQ(a.ladder.entries[i].value, b.ladder.entries[i].value);
}
