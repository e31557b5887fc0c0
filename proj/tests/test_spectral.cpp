#include <gtest/gtest.h>

#include "treeharm/spectral.hpp"
#include "treeharm/verify.hpp"

using namespace treeharm;

TEST(Gamma, UnitValueAtOne) {
    for (int q : {2, 3, 7}) EXPECT_NEAR(std::abs(gamma(Complex(1.0), Degree(q)) - 1.0), 0.0, 1e-15);
}

TEST(Gamma, SpectralRadiusAtHalf) {
    for (int q : {2, 3, 4}) {
        const Degree d(q);
        EXPECT_NEAR(std::abs(gamma(Complex(0.5), d) - spectral_radius(d)), 0.0, 1e-15);
    }
    EXPECT_NEAR(spectral_radius(Degree(4)), 0.8, 1e-15);
}

TEST(Gamma, SymmetryUnderReflection) {
    Sampler smp(21);
    const Degree d(2);
    for (int t = 0; t < 100; ++t) {
        const Complex z = smp.complex_box(3.0, 3.0);
        EXPECT_LT(std::abs(gamma(z, d) - gamma(Complex(1.0) - z, d)), 1e-12);
    }
}

TEST(Spectrum, Membership) {
    const Degree d(2);
    EXPECT_TRUE(in_l2_spectrum(Complex(0.0), d));
    EXPECT_FALSE(in_l2_spectrum(Complex(2.0), d));
    EXPECT_TRUE(in_l2_spectrum(Complex(spectral_radius(d)), d));
    EXPECT_FALSE(in_l2_spectrum(Complex(spectral_radius(d) + 1e-3), d));
    EXPECT_TRUE(in_l2_spectrum(Complex(0.5, 1e-15), d));
    EXPECT_FALSE(in_l2_spectrum(Complex(0.5, 1e-3), d));
}

TEST(ZFromLambda, SelectsPrincipalRoot) {
    const Degree d(2);
    // lambda = 1: roots of w^2 - 3w + 2 are {1, 2}; take w = q = 2, z = 1.
    EXPECT_LT(std::abs(z_from_lambda(Complex(1.0), d) - Complex(1.0)), 1e-14);
    const double rho = spectral_radius(d);
    const Complex z = z_from_lambda(Complex(rho * 1.01), d);
    EXPECT_NEAR(z.imag(), 0.0, 1e-14);
    EXPECT_GT(z.real(), 0.5);
    EXPECT_THROW(z_from_lambda(Complex(rho), d), spectrum_error);
    EXPECT_THROW(z_from_lambda(Complex(0.5), d), spectrum_error);
}

TEST(ZFromLambda, NegativeRealAxis) {
    const Degree d(2);
    const Complex z = z_from_lambda(Complex(-2.0), d);
    EXPECT_GT(z.real(), 0.5);
    EXPECT_LT(std::abs(gamma(z, d) + 2.0), 1e-13);
}

TEST(ZFromLambda, RoundTripOffSpectrum) {
    for (int q : {2, 3}) {
        const Degree d(q);
        Sampler smp(31);
        for (int t = 0; t < 100; ++t) {
            const Complex la = smp.eigen_param(d).lambda();
            const Complex z = z_from_lambda(la, d);
            EXPECT_GT(z.real(), 0.5);
            EXPECT_LT(std::abs(gamma(z, d) - la) / std::abs(la), 1e-11);
        }
    }
}

TEST(EigenParam, FactoriesEnforceInvariants) {
    const Degree d(2);
    const EigenParam a = EigenParam::from_z(d, Complex(1.2, 0.4));
    EXPECT_LT(std::abs(a.lambda() - gamma(a.z(), d)) / std::abs(a.lambda()), 1e-12);
    const EigenParam b = EigenParam::from_lambda(d, Complex(1.7, -0.2));
    EXPECT_LT(std::abs(b.lambda() - gamma(b.z(), d)) / std::abs(b.lambda()), 1e-12);
    EXPECT_THROW(EigenParam::from_z(d, Complex(0.3)), precondition_error);
    EXPECT_THROW(EigenParam::from_z(d, Complex(0.5, 0.7)), spectrum_error);
    EXPECT_THROW(EigenParam::from_lambda(d, Complex(0.1)), spectrum_error);
}

TEST(ZJet, OrderZeroIsJustZ) {
    const EigenParam p = EigenParam::from_z(Degree(2), Complex(1.3));
    const CJet j = z_jet(p, 0);
    EXPECT_EQ(j.order(), 0);
    EXPECT_EQ(j[0], p.z());
}

TEST(ZJet, LinearTermClosedForm) {
    for (int q : {2, 3}) {
        const Degree d(q);
        for (Complex z : {Complex(0.8), Complex(1.0), Complex(1.5, 0.3)}) {
            const EigenParam p = EigenParam::from_z(d, z);
            const Complex expect = Complex(q + 1) /
                                   (d.log_q() * (q_pow(d, z) - q_pow(d, Complex(1.0) - z)));
            EXPECT_LT(std::abs(z_jet(p, 3)[1] - expect) / std::abs(expect), 1e-12);
        }
    }
}

TEST(ZJet, LinearTermMatchesCentralDifference) {
    const Degree d(2);
    const EigenParam p = EigenParam::from_lambda(d, Complex(2.0));
    auto f = [&](Complex la) { return z_from_lambda(la, d); };
    const Complex fd = central_difference(f, p.lambda(), 1, 1e-5);
    const Complex jet = z_jet(p, 1)[1];
    EXPECT_LT(std::abs(fd - jet) / std::abs(jet), 1e-6);
}

TEST(ZJet, ComposesWithGammaToIdentity) {
    const Degree d(2);
    for (Complex la : {Complex(2.0), Complex(1.3, 0.5)}) {
        const EigenParam p = EigenParam::from_lambda(d, la);
        CJet g = gamma_jet(p, 6);
        CJet h = z_jet(p, 6);
        h[0] = Complex{};
        const CJet idj = compose(g, CJet(g.base(), h.coeffs()));
        EXPECT_LT(std::abs(idj[0] - la), 1e-12 * std::abs(la));
        EXPECT_LT(std::abs(idj[1] - Complex(1.0)), 1e-12);
        for (int k = 2; k <= 6; ++k) EXPECT_LT(std::abs(idj[k]), 1e-10);
    }
}

TEST(ZJet, MatchesRichardsonDifferencesUpToOrderFive) {
    const Degree d(2);
    for (Complex la : {Complex(2.0), Complex(1.4, 0.6)}) {
        const EigenParam p = EigenParam::from_lambda(d, la);
        const CJet j = z_jet(p, 5);
        auto f = [&](Complex x) { return z_from_lambda(x, d); };
        // z is analytic, so differencing along the imaginary axis sees the
        // same derivatives up to i^r; averaging the two directions cancels
        // the h^2 and h^6 error terms, Richardson removes h^4.
        auto g = [&](Complex x) { return f(la + Complex(0.0, 1.0) * (x - la)); };
        const Complex i_unit(0.0, 1.0);
        double fact = 1.0;
        Complex i_pow(1.0);
        for (int r = 1; r <= 5; ++r) {
            fact *= r;
            i_pow *= i_unit;
            const double h = fd_safe_step(la, d);
            const Complex fd_re = richardson_fd(f, la, r, h);
            const Complex fd_im = richardson_fd(g, la, r, h) / i_pow;
            const Complex fd = (fd_re + fd_im) / 2.0;
            const Complex jet = fact * j[r];
            EXPECT_LT(std::abs(fd - jet) / std::abs(jet), 1e-4)
                << "r=" << r << " lambda=" << la;
        }
    }
}

TEST(ZJet, GammaJetMatchesDefinition) {
    const Degree d(3);
    const EigenParam p = EigenParam::from_z(d, Complex(1.1, 0.2));
    const CJet g = gamma_jet(p, 4);
    EXPECT_LT(std::abs(g[0] - p.lambda()), 1e-14);
    // compare against a central difference of gamma along the real direction
    auto f = [&](Complex z) { return gamma(z, d); };
    const Complex fd = central_difference(f, p.z(), 1, 1e-6);
    EXPECT_LT(std::abs(g[1] - fd) / std::abs(fd), 1e-9);
}
