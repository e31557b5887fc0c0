#include <gtest/gtest.h>

#include <random>

#include "treeharm/jet.hpp"

using namespace treeharm;

namespace {

CJet random_jet(std::mt19937_64& rng, int order, bool unit_lead = false) {
    auto coin = [&] { return (static_cast<double>(rng() >> 11) * 0x1.0p-53) * 2.0 - 1.0; };
    std::vector<Complex> c(static_cast<std::size_t>(order) + 1);
    for (auto& x : c) x = Complex(coin(), coin());
    if (unit_lead) c[0] = Complex(1.0 + 0.5 * coin(), 0.3 * coin());
    return CJet(Complex{}, std::move(c));
}

double jet_dist(const CJet& a, const CJet& b) {
    double m = 0.0;
    for (int k = 0; k <= a.order(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

} // namespace

TEST(Jet, ConstantAndVariable) {
    const CJet c = CJet::constant(Complex(2.0), Complex(5.0), 3);
    EXPECT_EQ(c.order(), 3);
    EXPECT_EQ(c[0], Complex(5.0));
    EXPECT_EQ(c[2], Complex{});
    const CJet v = CJet::variable(Complex(2.0), Complex(5.0), 3);
    EXPECT_EQ(v[1], Complex(1.0));
}

TEST(Jet, MultiplicationAssociative) {
    std::mt19937_64 rng(42);
    for (int t = 0; t < 30; ++t) {
        const CJet a = random_jet(rng, 8), b = random_jet(rng, 8), c = random_jet(rng, 8);
        EXPECT_LT(jet_dist((a * b) * c, a * (b * c)), 1e-12);
    }
}

TEST(Jet, ExpInverse) {
    std::mt19937_64 rng(43);
    const CJet one = CJet::constant(Complex{}, Complex(1.0), 8);
    for (int t = 0; t < 30; ++t) {
        const CJet a = random_jet(rng, 8);
        EXPECT_LT(jet_dist(exp(a) * exp(-a), one), 1e-12);
    }
}

TEST(Jet, ReciprocalInverts) {
    std::mt19937_64 rng(44);
    const CJet one = CJet::constant(Complex{}, Complex(1.0), 8);
    for (int t = 0; t < 30; ++t) {
        const CJet a = random_jet(rng, 8, true);
        EXPECT_LT(jet_dist(a * reciprocal(a), one), 1e-11);
    }
}

TEST(Jet, DerivativeShiftsCoefficients) {
    const CJet a(Complex{}, {Complex(1.0), Complex(2.0), Complex(3.0), Complex(4.0)});
    const CJet d = derivative(a);
    EXPECT_EQ(d.order(), 2);
    EXPECT_EQ(d[0], Complex(2.0));
    EXPECT_EQ(d[1], Complex(6.0));
    EXPECT_EQ(d[2], Complex(12.0));
}

TEST(Jet, ComposeAgainstHandExpansion) {
    // f(e) = 1 + e^2, g(d) = d + d^2: f(g(d)) = 1 + d^2 + 2 d^3 + d^4
    const CJet f(Complex{}, {Complex(1.0), Complex{}, Complex(1.0), Complex{}, Complex{}});
    const CJet g(Complex{}, {Complex{}, Complex(1.0), Complex(1.0), Complex{}, Complex{}});
    const CJet fg = compose(f, g);
    EXPECT_NEAR(std::abs(fg[0] - Complex(1.0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(fg[1]), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(fg[2] - Complex(1.0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(fg[3] - Complex(2.0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(fg[4] - Complex(1.0)), 0.0, 1e-15);
}

TEST(Jet, ComposeRequiresZeroInnerConstant) {
    const CJet f = CJet::constant(Complex{}, Complex(1.0), 3);
    const CJet g = CJet::constant(Complex{}, Complex(1.0), 3);
    EXPECT_THROW(compose(f, g), precondition_error);
}

TEST(Jet, SeriesInversionRoundTrip) {
    std::mt19937_64 rng(45);
    const CJet id = CJet::variable(Complex{}, Complex{}, 8);
    for (int t = 0; t < 20; ++t) {
        CJet g = random_jet(rng, 8, true);
        g[0] = Complex{};
        g[1] = Complex(1.0) + 0.5 * g[2]; // keep the linear term away from zero
        const CJet h = invert_series(g);
        EXPECT_LT(jet_dist(compose(g, h), id), 1e-10);
        EXPECT_LT(jet_dist(compose(h, g), id), 1e-10);
    }
}

TEST(Jet, InversionPreconditions) {
    EXPECT_THROW(invert_series(CJet::constant(Complex{}, Complex(1.0), 4)), precondition_error);
    CJet flat = CJet::constant(Complex{}, Complex{}, 4);
    EXPECT_THROW(invert_series(flat), precondition_error); // zero linear term
}

TEST(Jet, MismatchedOperandsRejected) {
    const CJet a = CJet::constant(Complex{}, Complex(1.0), 3);
    const CJet b = CJet::constant(Complex{}, Complex(1.0), 4);
    EXPECT_THROW(a + b, precondition_error);
    const CJet c = CJet::constant(Complex(1.0), Complex(1.0), 3);
    EXPECT_THROW(a * c, precondition_error);
}

TEST(Jet, ResizedTruncatesAndPads) {
    const CJet a(Complex{}, {Complex(1.0), Complex(2.0), Complex(3.0)});
    EXPECT_EQ(a.resized(1).order(), 1);
    EXPECT_EQ(a.resized(1)[1], Complex(2.0));
    EXPECT_EQ(a.resized(4)[4], Complex{});
}
