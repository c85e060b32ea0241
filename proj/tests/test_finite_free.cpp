#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "ffstam/finite_free.hpp"
#include "ffstam/hermite.hpp"

namespace {

using ffstam::PolyCoeffs;
using ffstam::PrecisionContext;
using ffstam::RootConfig;
using R30 = ffstam::mpfr_real<30>;
using R60 = ffstam::mpfr_real<60>;

// Permutation average (1/n!) sum_pi prod_i (x - alpha_i - beta_pi(i)) in exact
// integer arithmetic; returns n! * a_k for the signed convention.
std::vector<long long> permutation_average_scaled(const std::vector<long long>& alpha,
                                                  const std::vector<long long>& beta) {
    const std::size_t n = alpha.size();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<long long> total(n + 1, 0);
    do {
        std::vector<long long> e(n + 1, 0);
        e[0] = 1;
        for (std::size_t m = 0; m < n; ++m) {
            const long long root = alpha[m] + beta[perm[m]];
            for (std::size_t k = m + 1; k >= 1; --k) e[k] += root * e[k - 1];
        }
        for (std::size_t k = 0; k <= n; ++k) total[k] += e[k];
    } while (std::next_permutation(perm.begin(), perm.end()));
    return total;
}

TEST(BoxplusCoeffs, QuadraticExample) {
    const PolyCoeffs<double> a({1.0, 0.0, -1.0});
    const auto c = ffstam::boxplus_coeffs(a, a);
    EXPECT_EQ(c.values(), (std::vector<double>{1.0, 0.0, -2.0}));
}

TEST(BoxplusCoeffs, MonomialIsIdentity) {
    const auto a = ffstam::roots_to_coeffs(RootConfig<double>({-2.5, -0.3, 0.7, 1.1, 4.0}));
    std::vector<double> id(6, 0.0);
    id[0] = 1.0;
    const auto c = ffstam::boxplus_coeffs(a, PolyCoeffs<double>(id));
    for (std::size_t k = 0; k <= 5; ++k) EXPECT_DOUBLE_EQ(c[k], a[k]);
}

TEST(BoxplusCoeffs, DegreeMismatch) {
    EXPECT_THROW(ffstam::boxplus_coeffs(PolyCoeffs<double>({1.0, 0.0}), PolyCoeffs<double>({1.0, 0.0, 0.0})),
                 ffstam::DegreeMismatch);
}

TEST(BoxplusCoeffs, HermiteSelfConvolutionScalesBySqrt2) {
    const auto ctx = PrecisionContext::with_digits(30);
    const auto he = ffstam::hermite_coeffs<R30>(6);
    const auto gamma = ffstam::coeffs_to_roots(ffstam::boxplus_coeffs(he, he), ctx);
    const auto raw = ffstam::hermite_raw_roots<R30>(6, ctx);
    for (std::size_t i = 0; i < 6; ++i) EXPECT_LT(abs(gamma[i] - sqrt(R30(2)) * raw[i]), R30("1e-25"));
}

TEST(BoxplusCoeffs, CommutativeBitForBit) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + trial % 15;
        std::vector<double> x(n), y(n);
        for (auto& v : x) v = nd(rng);
        for (auto& v : y) v = nd(rng);
        const auto a = ffstam::roots_to_coeffs(RootConfig<double>::from_unsorted(x));
        const auto b = ffstam::roots_to_coeffs(RootConfig<double>::from_unsorted(y));
        EXPECT_EQ(ffstam::boxplus_coeffs(a, b).values(), ffstam::boxplus_coeffs(b, a).values());
    }
}

// Property: coefficient formula equals the S_n permutation average on random
// integer-rooted pairs, n in {2,3,4}.
TEST(BoxplusCoeffs, MatchesPermutationAverage) {
    std::mt19937_64 rng(12345);
    std::uniform_int_distribution<int> root(-6, 6);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + trial % 3;
        std::vector<long long> ai(n), bi(n);
        for (auto& v : ai) v = root(rng);
        for (auto& v : bi) v = root(rng);
        std::sort(ai.begin(), ai.end());
        std::sort(bi.begin(), bi.end());
        const auto scaled = permutation_average_scaled(ai, bi);
        long long nfact = 1;
        for (std::size_t k = 2; k <= n; ++k) nfact *= static_cast<long long>(k);

        const auto a = ffstam::roots_to_coeffs(RootConfig<double>(std::vector<double>(ai.begin(), ai.end())));
        const auto b = ffstam::roots_to_coeffs(RootConfig<double>(std::vector<double>(bi.begin(), bi.end())));
        const auto c = ffstam::boxplus_coeffs(a, b);
        for (std::size_t k = 0; k <= n; ++k) {
            const double expected = static_cast<double>(scaled[k]) / static_cast<double>(nfact);
            EXPECT_NEAR(c[k], expected, 1e-12 * std::max(1.0, std::abs(expected))) << "trial " << trial << " k " << k;
        }
    }
}

TEST(Omega, QuadraticExample) {
    const auto ctx = PrecisionContext::with_digits(15);
    const RootConfig<double> a({-1.0, 1.0});
    const auto g = ffstam::omega(a, a, ctx);
    EXPECT_NEAR(g[0], -std::sqrt(2.0), 1e-14);
    EXPECT_NEAR(g[1], std::sqrt(2.0), 1e-14);
}

TEST(Omega, ZeroConfigIsIdentity) {
    const auto ctx = PrecisionContext::with_digits(30);
    const RootConfig<R30> alpha({R30(-1.5), R30("-0.25"), R30(0.5), R30(2)});
    const RootConfig<R30> zero(std::vector<R30>(4, R30(0)));
    const auto g = ffstam::omega(alpha, zero, ctx);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_LT(abs(g[i] - alpha[i]), R30("1e-25"));
}

TEST(Omega, HermiteFixedPoint) {
    const auto ctx = PrecisionContext::with_digits(30);
    for (std::size_t n : {6u, 10u}) {
        const auto h = ffstam::hermite_roots<R30>(n, ctx);
        const auto g = ffstam::omega(h, h, ctx);
        for (std::size_t i = 0; i < n; ++i) EXPECT_LT(abs(g[i] - sqrt(R30(2)) * h[i]), R30("1e-10"));
    }
}

TEST(Omega, SymmetricInArguments) {
    const auto ctx = PrecisionContext::with_digits(15);
    const RootConfig<double> a({-2.0, -0.5, 0.3, 1.7});
    const RootConfig<double> b({-1.0, 0.1, 0.2, 3.0});
    EXPECT_EQ(ffstam::omega(a, b, ctx).values(), ffstam::omega(b, a, ctx).values());
}

// Property: translation equivariance and variance additivity.
TEST(Omega, TranslationAndVarianceProperties) {
    std::mt19937_64 rng(99);
    std::normal_distribution<double> nd;
    const auto ctx = PrecisionContext::with_digits(30);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t n = 3 + trial % 8;
        std::vector<R30> x(n), y(n);
        for (auto& v : x) v = R30(nd(rng));
        for (auto& v : y) v = R30(nd(rng));
        const auto alpha = RootConfig<R30>::from_unsorted(x);
        const auto beta = RootConfig<R30>::from_unsorted(y);
        const auto gamma = ffstam::omega(alpha, beta, ctx);

        const R30 shift(nd(rng));
        std::vector<R30> xs(alpha.values());
        for (auto& v : xs) v += shift;
        const auto gamma_shift = ffstam::omega(RootConfig<R30>(xs), beta, ctx);
        for (std::size_t i = 0; i < n; ++i) EXPECT_LT(abs(gamma_shift[i] - gamma[i] - shift), R30("1e-15"));

        const R30 lhs = ffstam::variance_of(gamma.roots());
        const R30 rhs = ffstam::variance_of(alpha.roots()) + ffstam::variance_of(beta.roots());
        EXPECT_LT(abs(lhs - rhs), R30("1e-10"));
    }
}

TEST(ConvolutionWeights, ExactValues) {
    const auto& w = ffstam::ConvolutionWeights::get(4);
    // (4-1)!(4-1)!/(4!(4-2)!) = 36/48 = 3/4
    EXPECT_EQ(w(1, 1), ffstam::mp::cpp_rational(3, 4));
    EXPECT_EQ(w(0, 3), ffstam::mp::cpp_rational(1));
    EXPECT_EQ(w(2, 2), ffstam::mp::cpp_rational(1, 6));
}

}  // namespace
