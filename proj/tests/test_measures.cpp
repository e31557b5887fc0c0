#include <gtest/gtest.h>

#include "treeharm/measures.hpp"
#include "treeharm/verify.hpp"

using namespace treeharm;

namespace {
const Degree d2(2);

BoundaryMeasure unit_atom(const BoundaryRay& xi, Complex w = Complex(1.0)) {
    return BoundaryMeasure::atomic(d2, {{xi, w}});
}
} // namespace

TEST(TvNorm, PointMassAndMixtures) {
    EXPECT_EQ(tv_norm(unit_atom(BoundaryRay(root(), 0))), 1.0);
    const BoundaryMeasure m = BoundaryMeasure::atomic(
        d2, {{BoundaryRay(root(), 0), Complex(2.0)}, {BoundaryRay(root(), 1), Complex(-1.0)}});
    EXPECT_EQ(tv_norm(m), 3.0);
    EXPECT_EQ(tv_norm(BoundaryMeasure(d2)), 0.0);
}

TEST(TvNorm, NuIsProbability) {
    for (int q : {2, 3})
        for (int depth = 1; depth <= 3; ++depth) {
            const BoundaryMeasure nu = nu_o(depth, Degree(q));
            EXPECT_NEAR(tv_norm(nu), 1.0, 1e-12);
            EXPECT_NEAR(std::abs(total_mass(nu)), 1.0, 1e-12);
        }
}

TEST(Nu, SectorValues) {
    const BoundaryMeasure nu1 = nu_o(1, d2);
    ASSERT_TRUE(nu1.cylinder().has_value());
    EXPECT_EQ(nu1.cylinder()->depth, 1);
    ASSERT_EQ(nu1.cylinder()->values.size(), 3u);
    for (const auto& v : nu1.cylinder()->values) EXPECT_EQ(v, Complex(1.0 / 3.0));
    const BoundaryMeasure nu2 = nu_o(2, d2);
    ASSERT_EQ(nu2.cylinder()->values.size(), 6u);
    for (const auto& v : nu2.cylinder()->values) EXPECT_EQ(v, Complex(1.0 / 6.0));
    EXPECT_THROW(nu_o(0, d2), precondition_error);
}

TEST(Refine, NuRefinesToNu) {
    for (int depth = 1; depth <= 2; ++depth)
        EXPECT_LT(diff_tv(refine(nu_o(depth, d2), depth + 1), nu_o(depth + 1, d2)), 1e-15);
}

TEST(Refine, SplitsEvenly) {
    std::vector<Complex> vals = {Complex(0.6), Complex(-0.3), Complex(0.0, 0.9)};
    const BoundaryMeasure m = BoundaryMeasure::cylinder_measure(d2, 1, vals);
    const BoundaryMeasure r = refine(m, 2);
    ASSERT_EQ(r.cylinder()->values.size(), 6u);
    EXPECT_EQ(r.cylinder()->values[0], Complex(0.3));
    EXPECT_EQ(r.cylinder()->values[1], Complex(0.3));
    EXPECT_EQ(r.cylinder()->values[2], Complex(-0.15));
    EXPECT_EQ(r.cylinder()->values[4], Complex(0.0, 0.45));
    EXPECT_TRUE(exactly_equal(refine(m, 1), m)); // same depth = identity
    EXPECT_THROW(refine(r, 1), precondition_error);
}

TEST(Refine, PreservesTotalVariation) {
    Sampler smp(8);
    for (int q : {2, 3}) {
        const Degree d(q);
        for (int t = 0; t < 20; ++t) {
            const BoundaryMeasure m = smp.measure(d);
            if (!m.cylinder()) continue;
            const BoundaryMeasure r = refine(m, m.cylinder()->depth + 2);
            EXPECT_NEAR(tv_norm(r), tv_norm(m), 1e-12 * (1.0 + tv_norm(m)));
        }
    }
}

TEST(Atoms, CanonicalizationMergesAndDropsZeros) {
    const BoundaryRay a(Vertex{0, 1, 1}, 1); // canonically prefix [0], repeat 1
    const BoundaryRay b(Vertex{0}, 1);
    const BoundaryMeasure m = BoundaryMeasure::atomic(
        d2, {{a, Complex(2.0)}, {b, Complex(-1.0)}, {BoundaryRay(root(), 0), Complex(0.0)}});
    ASSERT_EQ(m.atoms().size(), 1u);
    EXPECT_EQ(m.atoms()[0].weight, Complex(1.0));
    EXPECT_EQ(m.atoms()[0].ray, b);
}

TEST(Cylinder, CompletenessEnforced) {
    EXPECT_THROW(BoundaryMeasure::cylinder_measure(d2, 1, {Complex(1.0)}), precondition_error);
    EXPECT_THROW(BoundaryMeasure::cylinder_measure(d2, 0, {}), precondition_error);
}

TEST(Integrate, PointMassGivesKernel) {
    const EigenParam p = EigenParam::from_z(d2, Complex(1.3, 0.2));
    Sampler smp(9);
    for (int t = 0; t < 20; ++t) {
        const BoundaryRay xi = smp.ray(d2, 3);
        const Vertex x = smp.vertex(d2, 5);
        for (int r = 0; r <= 3; ++r)
            EXPECT_LT(std::abs(integrate_kernel(unit_atom(xi), x, p, r) -
                               kernel_derivative(x, xi, p, r)),
                      1e-13 * (1.0 + std::abs(kernel_derivative(x, xi, p, r))));
    }
}

TEST(Integrate, NuAtRoot) {
    const EigenParam p = EigenParam::from_z(d2, Complex(1.3, 0.2));
    const BoundaryMeasure nu = nu_o(2, d2);
    EXPECT_NEAR(std::abs(integrate_kernel(nu, root(), p, 0) - Complex(1.0)), 0.0, 1e-14);
    for (int r = 1; r <= 4; ++r)
        EXPECT_EQ(integrate_kernel(nu, root(), p, r), Complex{}); // K(o,.) constant in lambda
}

TEST(Integrate, HandComputedSphericalValue) {
    // q = 2, lambda = 1 (z = 1), x at depth 1:
    // (1/3) q^1 + (2/3) q^{-1} = 2/3 + 1/3 = 1.
    const EigenParam p = EigenParam::from_z(d2, Complex(1.0));
    const Complex v = integrate_kernel(nu_o(1, d2), Vertex{0}, p, 0);
    EXPECT_NEAR(v.real(), 1.0, 1e-14);
    EXPECT_NEAR(v.imag(), 0.0, 1e-14);
}

TEST(Integrate, Linearity) {
    const EigenParam p = EigenParam::from_z(d2, Complex(0.9, -0.4));
    Sampler smp(10);
    for (int t = 0; t < 15; ++t) {
        const BoundaryMeasure s = smp.measure(d2), u = smp.measure(d2);
        const Complex a = smp.complex_box(1.0, 1.0), b = smp.complex_box(1.0, 1.0);
        const BoundaryMeasure combo = add(scaled(s, a), scaled(u, b));
        const Vertex x = smp.vertex(d2, 4);
        for (int r = 0; r <= 2; ++r) {
            const Complex lhs = integrate_kernel(combo, x, p, r);
            const Complex rhs =
                a * integrate_kernel(s, x, p, r) + b * integrate_kernel(u, x, p, r);
            EXPECT_LT(std::abs(lhs - rhs),
                      1e-12 * (1.0 + std::abs(lhs) + std::abs(rhs) + q_growth(p, x.depth())));
        }
    }
}

// The cylinder integral is computed from confluent-depth masses; this checks
// it against the definition: refine to depth max(d, |x|) and sum sector by
// sector with one ray per sector.
TEST(Integrate, MatchesLiteralRefineAndSum) {
    Sampler smp(11);
    for (int q : {2, 3}) {
        const Degree d(q);
        const EigenParam p = EigenParam::from_z(d, Complex(1.25, 0.15));
        for (int t = 0; t < 10; ++t) {
            const BoundaryMeasure m = smp.measure(d);
            const Vertex x = smp.vertex(d, 4);
            for (int r = 0; r <= 3; ++r) {
                Complex literal{};
                for (const auto& a : m.atoms())
                    literal += a.weight * kernel_derivative(x, a.ray, p, r);
                if (m.cylinder()) {
                    const int depth = std::max(m.cylinder()->depth, std::max(x.depth(), 1));
                    const BoundaryMeasure fine = refine(m, depth);
                    const auto& vals = fine.cylinder()->values;
                    for (std::size_t i = 0; i < vals.size(); ++i) {
                        const Vertex u = sphere_vertex(d, depth, static_cast<std::int64_t>(i));
                        literal += vals[i] * kernel_derivative(x, ray_through(u), p, r);
                    }
                }
                literal *= m.scale_factor();
                const Complex fast = integrate_kernel(m, x, p, r);
                EXPECT_LT(std::abs(fast - literal),
                          1e-11 * (1.0 + std::abs(fast) + std::abs(literal) +
                                   q_growth(p, x.depth())))
                    << "q=" << q << " r=" << r;
            }
        }
    }
}

TEST(Integrate, InvariantUnderRefinement) {
    Sampler smp(12);
    const EigenParam p = EigenParam::from_z(d2, Complex(1.1, 0.3));
    for (int t = 0; t < 15; ++t) {
        const BoundaryMeasure m = smp.measure(d2);
        if (!m.cylinder()) continue;
        const BoundaryMeasure r2 = refine(m, m.cylinder()->depth + 2);
        const Vertex x = smp.vertex(d2, 5);
        const Complex a = integrate_kernel(m, x, p, 1);
        const Complex b = integrate_kernel(r2, x, p, 1);
        EXPECT_LT(std::abs(a - b), 1e-12 * (1.0 + std::abs(a) + q_growth(p, x.depth())));
    }
}

TEST(Scaling, RationalRoundTripIsExact) {
    Sampler smp(13);
    for (int t = 0; t < 30; ++t) {
        const BoundaryMeasure m = materialized(smp.measure(d2));
        for (std::int64_t k : {2, 3, 5, 7}) {
            const BoundaryMeasure back = scaled_rational(scaled_rational(m, 1, k), k, 1);
            EXPECT_TRUE(exactly_equal(back, m));
        }
        EXPECT_NEAR(tv_norm(scaled_rational(m, 3, 1)), 3.0 * tv_norm(m),
                    1e-14 * (1.0 + tv_norm(m)));
    }
    EXPECT_THROW(scaled_rational(nu_o(1, d2), 1, 0), precondition_error);
}

TEST(Scaling, MassAndTvScaleHomogeneously) {
    Sampler smp(14);
    for (int t = 0; t < 20; ++t) {
        const BoundaryMeasure m = smp.measure(d2);
        const Complex c = smp.complex_box(2.0, 2.0);
        EXPECT_NEAR(tv_norm(scaled(m, c)), std::abs(c) * tv_norm(m),
                    1e-12 * (1.0 + tv_norm(m)));
        EXPECT_GE(tv_norm(m) + 1e-12, std::abs(total_mass(m)));
    }
}

TEST(Add, DegreeMismatchRejected) {
    EXPECT_THROW(add(nu_o(1, d2), nu_o(1, Degree(3))), precondition_error);
}

TEST(Add, MergesAtomsAndAlignsCylinders) {
    const BoundaryMeasure a = BoundaryMeasure::of(
        d2, {{BoundaryRay(root(), 0), Complex(1.0)}},
        CylinderPart{1, {Complex(0.5), Complex(0.0), Complex(0.0)}});
    const BoundaryMeasure b = BoundaryMeasure::of(
        d2, {{BoundaryRay(root(), 0), Complex(-1.0)}},
        CylinderPart{2, std::vector<Complex>(6, Complex(0.1))});
    const BoundaryMeasure s = add(a, b);
    EXPECT_TRUE(s.atoms().empty()); // weights cancelled exactly
    ASSERT_TRUE(s.cylinder().has_value());
    EXPECT_EQ(s.cylinder()->depth, 2);
    EXPECT_EQ(s.cylinder()->values[0], Complex(0.35));
    EXPECT_EQ(s.cylinder()->values[2], Complex(0.1));
}
