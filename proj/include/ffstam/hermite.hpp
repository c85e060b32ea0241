#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstddef>
#include <vector>

#include "ffstam/errors.hpp"
#include "ffstam/precision.hpp"
#include "ffstam/realroot.hpp"

namespace ffstam {

/// Signed coefficients of the probabilists' Hermite polynomial He_n:
/// a_{2m} = (-1)^m n! / (m! (n-2m)! 2^m), odd entries zero.
template <class Real>
PolyCoeffs<Real> hermite_coeffs(std::size_t n) {
    std::vector<Real> a(n + 1, Real(0));
    for (std::size_t m = 0; 2 * m <= n; ++m) {
        mp::cpp_int num = 1;
        for (std::size_t k = n - 2 * m + 1; k <= n; ++k) num *= static_cast<unsigned>(k);
        mp::cpp_int den = 1;
        for (std::size_t k = 2; k <= m; ++k) den *= static_cast<unsigned>(k);
        den <<= static_cast<unsigned>(m);
        const mp::cpp_int q = num / den;
        Real v;
        if constexpr (std::is_same_v<Real, double>) {
            v = static_cast<double>(q);
        } else {
            v = Real(q);
        }
        a[2 * m] = (m % 2 == 0) ? v : Real(-v);
    }
    return PolyCoeffs<Real>(std::move(a));
}

namespace detail {

/// He_n(x) and He_n'(x) by the three-term recurrence.
template <class Real>
std::pair<Real, Real> hermite_eval(std::size_t n, const Real& x) {
    Real prev(1), cur = x;
    if (n == 0) return {Real(1), Real(0)};
    for (std::size_t k = 1; k < n; ++k) {
        Real next = x * cur - Real(static_cast<double>(k)) * prev;
        prev = cur;
        cur = next;
    }
    return {cur, Real(static_cast<double>(n)) * prev};
}

}  // namespace detail

/// Unnormalized He_n roots, ascending; sum of squares is n(n-1).
template <class Real>
RootConfig<Real> hermite_raw_roots(std::size_t n, const PrecisionContext& ctx) {
    using std::abs;
    if (n < 1) throw InvalidArgument("hermite_roots: n must be >= 1");
    std::vector<Real> x = coeffs_to_roots(hermite_coeffs<Real>(n), ctx).values();
    // The recurrence is better conditioned than the monomial form; polish with it.
    const Real tol = pow10<Real>(-(digits_of<Real>() - 2));
    for (auto& xi : x) {
        for (int it = 0; it < 6; ++it) {
            const auto [f, df] = detail::hermite_eval(n, xi);
            if (df == Real(0)) break;
            const Real step = f / df;
            xi -= step;
            if (abs(step) <= tol * std::max(Real(1), Real(abs(xi)))) break;
        }
    }
    // Enforce exact symmetry about 0.
    for (std::size_t i = 0; i < n / 2; ++i) {
        const Real m = (x[n - 1 - i] - x[i]) / Real(2);
        x[i] = -m;
        x[n - 1 - i] = m;
    }
    if (n % 2 == 1) x[n / 2] = Real(0);
    return RootConfig<Real>(std::move(x));
}

/// h^(n): He_n roots scaled by 1/sqrt(n-1), so mean 0 and mean square 1.
template <class Real>
RootConfig<Real> hermite_roots(std::size_t n, const PrecisionContext& ctx) {
    using std::sqrt;
    if (n < 2) throw InvalidArgument("hermite_roots: n must be >= 2");
    std::vector<Real> x = hermite_raw_roots<Real>(n, ctx).values();
    const Real s = sqrt(Real(static_cast<double>(n - 1)));
    for (auto& xi : x) xi /= s;
    return RootConfig<Real>(std::move(x));
}

}  // namespace ffstam
