#include <gtest/gtest.h>

#include <random>

#include "ffstam/reference.hpp"

namespace {

using ffstam::Family;
using ffstam::FamilySpec;
using ffstam::FitMode;
using ffstam::PrecisionContext;
using ffstam::RootConfig;

const PrecisionContext kCtx = PrecisionContext::with_digits(15);

RootConfig<double> affine(const RootConfig<double>& r, double c, double d) {
    std::vector<double> v(r.values());
    for (auto& x : v) x = c * x + d;
    return RootConfig<double>(v);
}

TEST(HermiteRoots, SmallCases) {
    const auto h2 = ffstam::hermite_roots<double>(2, kCtx);
    EXPECT_NEAR(h2[0], -1.0, 1e-15);
    EXPECT_NEAR(h2[1], 1.0, 1e-15);
    const auto h6 = ffstam::hermite_roots<double>(6, kCtx);
    const double table[] = {-1.4866, -0.8449, -0.2758, 0.2758, 0.8449, 1.4866};
    for (int i = 0; i < 6; ++i) EXPECT_NEAR(h6[i], table[i], 1e-4);
    const auto raw = ffstam::hermite_raw_roots<double>(9, kCtx);
    double ss = 0;
    for (double x : raw.roots()) ss += x * x;
    EXPECT_NEAR(ss, 72.0, 1e-10);
}

TEST(NormalizeShape, Examples) {
    EXPECT_EQ(ffstam::normalize_shape(RootConfig<double>({-1.0, 1.0})).values(), (std::vector<double>{-1.0, 1.0}));
    EXPECT_EQ(ffstam::normalize_shape(RootConfig<double>({0.0, 2.0})).values(), (std::vector<double>{-1.0, 1.0}));
    const auto r = ffstam::normalize_shape(RootConfig<double>({1.0, 2.0, 6.0}));
    const double s = std::sqrt(14.0 / 3.0);
    EXPECT_NEAR(r[0], -2.0 / s, 1e-15);
    EXPECT_NEAR(r[1], -1.0 / s, 1e-15);
    EXPECT_NEAR(r[2], 3.0 / s, 1e-15);
    EXPECT_THROW(ffstam::normalize_shape(RootConfig<double>({1.0, 1.0, 1.0})), ffstam::DegenerateConfig);
}

// Property: idempotent, and Hermite distance vanishes after any affine map.
TEST(NormalizeShape, IdempotentAndAffineInvariant) {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> nd;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> x(3 + trial % 10);
        for (auto& v : x) v = nd(rng);
        const auto once = ffstam::normalize_shape(RootConfig<double>::from_unsorted(x));
        const auto twice = ffstam::normalize_shape(once);
        for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(once[i], twice[i], 1e-12);
    }
    for (std::size_t n : {4u, 7u, 12u}) {
        const auto h = ffstam::hermite_roots<double>(n, kCtx);
        EXPECT_LT(ffstam::hermite_distance(ffstam::normalize_shape(affine(h, 3.7, -2.1))), 1e-10);
    }
}

TEST(HermiteDistance, Examples) {
    const auto h = ffstam::hermite_roots<double>(6, kCtx);
    EXPECT_LT(ffstam::hermite_distance(h), 1e-15);
    const auto rev = ffstam::reversed(h.roots());
    EXPECT_LT(ffstam::hermite_distance<double>(rev), 1e-15);
    const auto u = ffstam::normalize_shape(RootConfig<double>({0, 1, 2, 3, 4, 5}));
    double direct = 0;
    for (int i = 0; i < 6; ++i) direct += (u[i] - h[i]) * (u[i] - h[i]);
    direct = std::sqrt(direct / 6);
    EXPECT_GT(ffstam::hermite_distance(u), 0.0);
    EXPECT_NEAR(ffstam::hermite_distance(u), direct, 1e-15);
}

TEST(PairDiagnostics, Examples) {
    const auto h = ffstam::hermite_roots<double>(8, kCtx);
    auto d = ffstam::pair_diagnostics(h, h);
    EXPECT_LT(d.D, 1e-28);
    EXPECT_EQ(d.d_PQ, 0.0);
    const RootConfig<double> a({-1.0, 1.0});
    const auto b = ffstam::normalize_shape(RootConfig<double>({-1.1, 1.1}));
    d = ffstam::pair_diagnostics(a, b);
    EXPECT_NEAR(d.d_PQ, 0.0, 1e-15);
    const RootConfig<double> c({-0.5, 1.5});
    EXPECT_NEAR(ffstam::pair_diagnostics(a, c).d_PQ, 0.5, 1e-15);
    EXPECT_DOUBLE_EQ(d.D, d.d_H_alpha * d.d_H_alpha + d.d_H_beta * d.d_H_beta);
}

TEST(FamilyReference, Constructions) {
    const auto u3 = ffstam::family_reference<double>({Family::UniformSpacing}, 3, kCtx);
    EXPECT_NEAR(u3.ref_roots[0], -std::sqrt(1.5), 1e-15);
    EXPECT_NEAR(u3.ref_roots[1], 0.0, 1e-15);
    EXPECT_NEAR(u3.ref_roots[2], std::sqrt(1.5), 1e-15);

    // Two pairs at unit spacing separated by a gap of 10: (0, 1, 11, 12).
    const auto tb = ffstam::family_reference<double>({Family::TwoBlockUniform, 0, 0, 10.0}, 4, kCtx);
    const auto direct = ffstam::normalize_shape(RootConfig<double>({0.0, 1.0, 11.0, 12.0}));
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(tb.ref_roots[i], direct[i], 1e-14);

    // Legendre nodes at n = 3: 0, +-sqrt(3/5), normalized.
    const auto leg = ffstam::family_reference<double>({Family::Jacobi, 0, 0}, 3, kCtx);
    const auto leg_direct = ffstam::normalize_shape(RootConfig<double>({-std::sqrt(0.6), 0.0, std::sqrt(0.6)}));
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(leg.ref_roots[i], leg_direct[i], 1e-13);

    // Chebyshev second kind is Jacobi(1/2, 1/2): nodes cos(k pi / (n+1)).
    const auto cheb = ffstam::family_reference<double>({Family::Jacobi, 0.5, 0.5}, 5, kCtx);
    std::vector<double> c2;
    for (int k = 5; k >= 1; --k) c2.push_back(std::cos(k * M_PI / 6.0));
    const auto c2n = ffstam::normalize_shape(RootConfig<double>(c2));
    for (int i = 0; i < 5; ++i) EXPECT_NEAR(cheb.ref_roots[i], c2n[i], 1e-12);

    const auto sc = ffstam::family_reference<double>({Family::SemicircleQuantiles}, 6, kCtx);
    EXPECT_NEAR(ffstam::mean_of(sc.ref_roots.roots()), 0.0, 1e-14);
    EXPECT_NEAR(ffstam::variance_of(sc.ref_roots.roots()), 1.0, 1e-14);
    EXPECT_NEAR(ffstam::detail::semicircle_cdf(2.0), 1.0, 1e-15);
    EXPECT_NEAR(ffstam::detail::semicircle_cdf(0.0), 0.5, 1e-15);

    EXPECT_THROW(ffstam::family_reference<double>({Family::Jacobi, -1.5, 0}, 4, kCtx), ffstam::InvalidFamilyParams);
    EXPECT_THROW(ffstam::family_reference<double>({Family::TwoBlockUniform}, 4, kCtx), ffstam::InvalidFamilyParams);
}

TEST(FamilyReference, ParseNames) {
    EXPECT_EQ(ffstam::parse_family("2BU").kind, Family::TwoBlockUniform);
    const auto j = ffstam::parse_family("Jacobi(0.5,0.5)");
    EXPECT_EQ(j.kind, Family::Jacobi);
    EXPECT_EQ(j.a, 0.5);
    EXPECT_EQ(j.name(), "Jacobi(0.5,0.5)");
    EXPECT_THROW(ffstam::parse_family("Laguerre"), ffstam::InvalidFamilyParams);
}

TEST(FamilyResidual, Examples) {
    const auto ref = ffstam::family_reference<double>({Family::SemicircleQuantiles}, 6, kCtx);
    std::vector<double> twice(ref.ref_roots.values());
    for (auto& x : twice) x *= 2;
    EXPECT_NEAR(ffstam::family_residual(RootConfig<double>(twice), ref), 0.0, 1e-15);
    const auto h = ffstam::hermite_roots<double>(6, kCtx);
    EXPECT_NEAR(ffstam::family_residual(h, ffstam::family_reference<double>({Family::Hermite}, 6, kCtx)), 0.0, 1e-15);
    // Anti-aligned input: the infimum sits at a -> 0+.
    std::vector<double> neg(ref.ref_roots.values());
    for (auto& x : neg) x = -x;
    EXPECT_NEAR(ffstam::family_residual<double>(neg, ref.ref_roots.roots()), 1.0, 1e-14);
}

// Property: d_family never exceeds the plain rms distance to the reference.
TEST(FamilyResidual, BoundedByPlainDistance) {
    std::mt19937_64 rng(6);
    std::normal_distribution<double> nd;
    for (const auto& spec : ffstam::default_library()) {
        if (spec.kind == Family::TwoBlockUniform) continue;
        const auto ref = ffstam::family_reference<double>(spec, 7, kCtx);
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<double> x(7);
            for (auto& v : x) v = nd(rng);
            const auto r = ffstam::normalize_shape(RootConfig<double>::from_unsorted(x));
            EXPECT_LE(ffstam::family_residual(r, ref),
                      ffstam::rms_distance(r.roots(), ref.ref_roots.roots()) + 1e-15);
        }
    }
}

TEST(FitFamily, TwoBlockRecoversGap) {
    const auto tb = ffstam::family_reference<double>({Family::TwoBlockUniform, 0, 0, 7.5}, 6, kCtx);
    const auto fit = ffstam::fit_family(tb.ref_roots, {Family::TwoBlockUniform}, kCtx);
    EXPECT_NEAR(fit.gap_ratio, 7.5, 1e-4);
    EXPECT_LT(fit.residual, 1e-5);
}

TEST(JointResidual, ModesAAndB) {
    const FamilySpec sc{Family::SemicircleQuantiles};
    const auto ref = ffstam::family_reference<double>(sc, 6, kCtx).ref_roots;
    EXPECT_NEAR(ffstam::joint_residual(ref, ref, sc, FitMode::A, kCtx), 0.0, 1e-14);
    EXPECT_NEAR(ffstam::joint_residual(ref, ref, sc, FitMode::B, kCtx), 0.0, 1e-7);
    const auto shifted = affine(ref, 2.0, 5.0);
    EXPECT_NEAR(ffstam::joint_residual(shifted, ref, sc, FitMode::A, kCtx), 0.0, 1e-14);
    EXPECT_GT(ffstam::joint_residual(shifted, ref, sc, FitMode::B, kCtx), 0.1);
}

// Property: Mode A is invariant under independent affine maps, Mode B only
// under common ones.
TEST(JointResidual, GaugeInvariance) {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> nd;
    const FamilySpec he{Family::Hermite};
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> x(6), y(6);
        for (auto& v : x) v = nd(rng);
        for (auto& v : y) v = nd(rng);
        const auto a = RootConfig<double>::from_unsorted(x);
        const auto b = RootConfig<double>::from_unsorted(y);
        const double a0 = ffstam::joint_residual(a, b, he, FitMode::A, kCtx);
        const double b0 = ffstam::joint_residual(a, b, he, FitMode::B, kCtx);
        EXPECT_NEAR(ffstam::joint_residual(affine(a, 3.0, 1.0), affine(b, 0.5, -2.0), he, FitMode::A, kCtx), a0,
                    1e-12);
        EXPECT_NEAR(ffstam::joint_residual(affine(a, 2.5, 1.0), affine(b, 2.5, 1.0), he, FitMode::B, kCtx), b0,
                    1e-12);
        EXPECT_GT(std::abs(ffstam::joint_residual(affine(a, 3.0, 0.0), b, he, FitMode::B, kCtx) - b0), 1e-6);
    }
}

TEST(ClassifySymmetries, Examples) {
    const auto h = ffstam::hermite_roots<double>(6, kCtx);
    for (double t : {0.05, 0.1, 0.2}) {
        const auto f = ffstam::classify_symmetries(h, h, t);
        EXPECT_TRUE(f.s1_alpha && f.s1_beta && f.s2_alpha && f.s2_beta && f.s3 && f.s4);
    }
    const auto tb = ffstam::family_reference<double>({Family::TwoBlockUniform, 0, 0, 6.0}, 5, kCtx).ref_roots;
    const auto f = ffstam::classify_symmetries(tb, h.degree() == 5 ? h : ffstam::hermite_roots<double>(5, kCtx), 0.05);
    EXPECT_FALSE(f.s1_alpha);
    EXPECT_FALSE(f.s2_alpha);
    // alpha = -rev(beta) is S4 without S3.
    std::vector<double> refl;
    for (auto it = tb.values().rbegin(); it != tb.values().rend(); ++it) refl.push_back(-*it);
    const auto g = ffstam::classify_symmetries(tb, RootConfig<double>(refl), 0.1);
    EXPECT_TRUE(g.s4);
    EXPECT_FALSE(g.s3);
}

}  // namespace
