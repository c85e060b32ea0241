#include <gtest/gtest.h>

#include <random>

#include "ffstam/clt.hpp"

namespace {

using ffstam::PrecisionContext;
using ffstam::RootConfig;
using R30 = ffstam::mpfr_real<30>;
using R60 = ffstam::mpfr_real<60>;
using R80 = ffstam::mpfr_real<80>;

TEST(CltStep, FixedPoints) {
    const auto ctx = PrecisionContext::with_digits(30);
    const auto h = ffstam::hermite_roots<R30>(8, ctx);
    const auto g = ffstam::clt_step(h, ctx);
    for (std::size_t i = 0; i < 8; ++i) EXPECT_LT(abs(g[i] - h[i]), R30("1e-10"));
    const auto pm = ffstam::clt_step(RootConfig<double>({-1.0, 1.0}), PrecisionContext::with_digits(15));
    EXPECT_NEAR(pm[0], -1.0, 1e-14);
    EXPECT_NEAR(pm[1], 1.0, 1e-14);
}

// Property: mean and variance conserved per step.
TEST(CltStep, ConservesMeanAndVariance) {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> nd;
    const auto ctx = PrecisionContext::with_digits(30);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<R30> x(3 + trial % 8);
        for (auto& v : x) v = R30(nd(rng));
        const auto f = RootConfig<R30>::from_unsorted(x);
        const auto g = ffstam::clt_step(f, ctx);
        const R30 vf = ffstam::variance_of(f.roots());
        EXPECT_LT(abs(ffstam::variance_of(g.roots()) - vf) / vf, R30("1e-10"));
        EXPECT_LT(abs(ffstam::mean_of(g.roots()) - ffstam::mean_of(f.roots())), R30("1e-10"));
    }
}

TEST(CltTrajectory, HermiteStaysFixed) {
    const auto ctx = PrecisionContext::with_digits(60);
    const auto traj = ffstam::clt_trajectory(ffstam::hermite_roots<R60>(10, ctx), 12, ctx);
    ASSERT_EQ(traj.steps.size(), 13u);
    for (const auto& s : traj.steps) EXPECT_LE(s.d_H, R60("1e-8"));
}

TEST(CltTrajectory, E2RateNearInverseSqrt2) {
    for (std::size_t n : {10u, 20u}) {
        const auto ctx = PrecisionContext::with_digits(ffstam::default_audit_digits(n));
        const auto f0 = ffstam::perturbed_hermite<R80>(n, 2, R80("1e-3"), ctx);
        const auto traj = ffstam::clt_trajectory(f0, 20, ctx);
        EXPECT_GE(traj.fitted_rate, 0.65) << n;
        EXPECT_LE(traj.fitted_rate, 0.76) << n;
        EXPECT_NEAR(traj.fitted_rate, std::sqrt(0.5), 0.05 * std::sqrt(0.5)) << n;
        // Monotone after the transient.
        for (std::size_t k = 4; k < traj.steps.size(); ++k) {
            EXPECT_LE(traj.steps[k].d_H, traj.steps[k - 1].d_H + R80("1e-6"));
        }
        for (const auto& s : traj.steps) {
            EXPECT_LT(abs(ffstam::mean_of(s.f.roots())), R80("1e-10"));
        }
    }
}

TEST(CltTrajectory, E1IsNeutral) {
    const auto ctx = PrecisionContext::with_digits(60);
    const auto f0 = ffstam::perturbed_hermite<R60>(10, 1, R60("1e-3"), ctx);
    const auto traj = ffstam::clt_trajectory(f0, 12, ctx);
    const R60 d0 = traj.steps.front().d_H;
    for (const auto& s : traj.steps) EXPECT_LT(abs(s.d_H - d0) / d0, R60("1e-3"));
    EXPECT_NEAR(traj.fitted_rate, 1.0, 1e-3);
}

TEST(CltTrajectory, RejectsShortRuns) {
    const auto ctx = PrecisionContext::with_digits(30);
    EXPECT_THROW(ffstam::clt_trajectory(ffstam::hermite_roots<R30>(4, ctx), 2, ctx), ffstam::InvalidArgument);
}

TEST(FitGeometricRate, ExactSequence) {
    std::vector<double> x, y;
    for (int k = 0; k < 10; ++k) {
        x.push_back(k);
        y.push_back(3.0 * std::pow(0.6, k));
    }
    EXPECT_NEAR(ffstam::fit_geometric_rate(x, y), 0.6, 1e-12);
}

}  // namespace
