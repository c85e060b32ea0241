#pragma once

// Variance-normalized finite free CLT iteration f -> (1/sqrt 2)_* (f boxplus f)
// and its empirical contraction rate near the Hermite fixed point.

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "ffstam/coupling.hpp"
#include "ffstam/errors.hpp"
#include "ffstam/finite_free.hpp"
#include "ffstam/precision.hpp"
#include "ffstam/realroot.hpp"
#include "ffstam/reference.hpp"

namespace ffstam {

/// Roots of f boxplus f divided by sqrt(2), with the dilation taken about the
/// mean so that mean and variance are both preserved. For mean-zero f this
/// is the plain rescaling.
template <class Real>
RootConfig<Real> clt_step(const RootConfig<Real>& f, const PrecisionContext& ctx) {
    using std::sqrt;
    const Real m = mean_of(f.roots());
    std::vector<Real> g = omega(f, f, ctx).values();
    const Real inv = Real(1) / sqrt(Real(2));
    for (auto& x : g) x = (x - Real(2) * m) * inv + m;
    return RootConfig<Real>(std::move(g));
}

template <class Real>
struct CltStep {
    std::size_t k = 0;
    RootConfig<Real> f;
    Real d_H{};
};

template <class Real>
struct CltTrajectory {
    std::vector<CltStep<Real>> steps;  // k = 0..K
    double fitted_rate = 0.0;
    std::pair<std::size_t, std::size_t> fit_window{0, 0};
};

/// Least-squares slope of log y against x, returned as exp(slope).
inline double fit_geometric_rate(const std::vector<double>& x, const std::vector<double>& y) {
    const double m = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double ly = std::log(y[i]);
        sx += x[i];
        sy += ly;
        sxx += x[i] * x[i];
        sxy += x[i] * ly;
    }
    const double den = m * sxx - sx * sx;
    if (den == 0.0) return 1.0;
    return std::exp((m * sxy - sx * sy) / den);
}

/// Iterates clt_step K times from f0 and fits d_H(f_k) ~ C lambda^k over
/// k in [3, K-1]. d_H is evaluated on f_k as it stands: the step preserves
/// mean and variance, so a unit-variance f0 keeps the trajectory in that
/// gauge, while a dilation of h stays visible as a constant offset.
///
/// Points with d_H at or below 10^{-digits/2} carry no rate information and
/// are left out of the fit. Throws DivergenceDetected when d_H grows tenfold
/// over three steps.
template <class Real>
CltTrajectory<Real> clt_trajectory(const RootConfig<Real>& f0, std::size_t K, const PrecisionContext& ctx) {
    if (K < 3) throw InvalidArgument("clt_trajectory: K must be >= 3");
    CltTrajectory<Real> traj;
    RootConfig<Real> f = f0;
    for (std::size_t k = 0; k <= K; ++k) {
        if (k > 0) f = clt_step(f, ctx);
        traj.steps.push_back({k, f, hermite_distance(f)});
        if (k >= 3) {
            const Real& now = traj.steps[k].d_H;
            const Real& before = traj.steps[k - 3].d_H;
            if (before > Real(0) && now > Real(10) * before) {
                throw DivergenceDetected("clt_trajectory: d_H grew more than 10x over 3 steps at k=" +
                                         std::to_string(k));
            }
        }
    }
    traj.fit_window = {3, K - 1};
    const double floor = to_double(pow10<Real>(-(digits_of<Real>() / 2)));
    std::vector<double> xs, ys;
    for (std::size_t k = 3; k + 1 <= K; ++k) {
        const double d = to_double(traj.steps[k].d_H);
        if (d > floor) {
            xs.push_back(static_cast<double>(k));
            ys.push_back(d);
        }
    }
    traj.fitted_rate = xs.size() >= 2 ? fit_geometric_rate(xs, ys) : 0.0;
    return traj;
}

/// h^(n) + eps * u_k, with u_k the k-th singular direction of E_n on W
/// (k = 1 for the neutral dilation mode, k = 2 for the first contracting one).
template <class Real>
RootConfig<Real> perturbed_hermite(std::size_t n, std::size_t k, const Real& eps, const PrecisionContext& ctx) {
    if (k < 1 || k > n - 1) throw InvalidArgument("perturbed_hermite: direction index out of range");
    const auto dirs = meanzero_singular_directions<Real>(n, ctx);
    std::vector<Real> r = hermite_roots<Real>(n, ctx).values();
    for (std::size_t i = 0; i < n; ++i) r[i] += eps * dirs[k - 1][i];
    return RootConfig<Real>::from_unsorted(std::move(r));
}

}  // namespace ffstam
