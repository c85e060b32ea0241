#pragma once

// Root configurations, signed coefficient vectors, and the conversions between
// them.
//
// Coefficient convention: f(x) = sum_k (-1)^k a_k x^(n-k), so a_k is the k-th
// elementary symmetric polynomial of the roots and a_0 = 1.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ffstam/errors.hpp"
#include "ffstam/precision.hpp"

namespace ffstam {

/// Sorted real roots of a monic degree-n polynomial.
template <class Real>
class RootConfig {
public:
    RootConfig() = default;

    /// Takes roots already in ascending order; throws if unsorted or non-finite.
    explicit RootConfig(std::vector<Real> roots) : roots_(std::move(roots)) {
        check_finite();
        if (!std::is_sorted(roots_.begin(), roots_.end())) {
            throw InvalidArgument("RootConfig: roots must be in ascending order");
        }
    }

    /// Sorts the input.
    static RootConfig from_unsorted(std::vector<Real> roots) {
        std::sort(roots.begin(), roots.end());
        return RootConfig(std::move(roots));
    }

    std::size_t degree() const noexcept { return roots_.size(); }
    std::span<const Real> roots() const noexcept { return roots_; }
    const std::vector<Real>& values() const noexcept { return roots_; }
    const Real& operator[](std::size_t i) const { return roots_[i]; }

    /// Smallest adjacent gap; +inf semantics are avoided by returning 0 for n < 2.
    Real min_gap() const {
        if (roots_.size() < 2) return Real(0);
        Real g = roots_[1] - roots_[0];
        for (std::size_t i = 2; i < roots_.size(); ++i) g = std::min(g, Real(roots_[i] - roots_[i - 1]));
        return g;
    }

    /// Largest absolute root value.
    Real scale() const {
        using std::abs;
        Real s(0);
        for (const auto& r : roots_) s = std::max(s, Real(abs(r)));
        return s;
    }

    friend bool operator==(const RootConfig&, const RootConfig&) = default;

private:
    void check_finite() const {
        using std::isfinite;
        for (const auto& r : roots_) {
            if (!isfinite(r)) throw InvalidArgument("RootConfig: non-finite root");
        }
    }

    std::vector<Real> roots_;
};

/// Signed coefficient vector (a_0, ..., a_n) with a_0 = 1.
template <class Real>
class PolyCoeffs {
public:
    PolyCoeffs() : a_{Real(1)} {}

    explicit PolyCoeffs(std::vector<Real> a) : a_(std::move(a)) {
        if (a_.empty() || a_[0] != Real(1)) {
            throw InvalidArgument("PolyCoeffs: a[0] must equal 1 (monic)");
        }
    }

    std::size_t degree() const noexcept { return a_.size() - 1; }
    std::span<const Real> coeffs() const noexcept { return a_; }
    const std::vector<Real>& values() const noexcept { return a_; }
    const Real& operator[](std::size_t k) const { return a_[k]; }

    friend bool operator==(const PolyCoeffs&, const PolyCoeffs&) = default;

private:
    std::vector<Real> a_;
};

/// Converts a configuration between scalar types.
template <class To, class From>
RootConfig<To> convert(const RootConfig<From>& r) {
    std::vector<To> v;
    v.reserve(r.degree());
    for (const auto& x : r.roots()) v.push_back(To(x));
    return RootConfig<To>(std::move(v));
}

namespace detail {

/// Elementary symmetric polynomials e_0..e_n of `roots`.
template <class Real>
std::vector<Real> elementary_symmetric(std::span<const Real> roots) {
    const std::size_t n = roots.size();
    std::vector<Real> e(n + 1, Real(0));
    e[0] = Real(1);
    for (std::size_t m = 0; m < n; ++m) {
        for (std::size_t k = m + 1; k >= 1; --k) e[k] += roots[m] * e[k - 1];
    }
    return e;
}

/// Monomial coefficients p[k] of x^(n-k) for the signed convention.
template <class Real>
std::vector<Real> monomial(std::span<const Real> a) {
    std::vector<Real> p(a.begin(), a.end());
    for (std::size_t k = 1; k < p.size(); k += 2) p[k] = -p[k];
    return p;
}

template <class Real>
struct Complex {
    Real re{0};
    Real im{0};

    friend Complex operator+(const Complex& x, const Complex& y) { return {x.re + y.re, x.im + y.im}; }
    friend Complex operator-(const Complex& x, const Complex& y) { return {x.re - y.re, x.im - y.im}; }
    friend Complex operator*(const Complex& x, const Complex& y) {
        return {x.re * y.re - x.im * y.im, x.re * y.im + x.im * y.re};
    }
    friend Complex operator/(const Complex& x, const Complex& y) {
        using std::abs;
        // Smith's algorithm.
        if (abs(y.re) >= abs(y.im)) {
            const Real r = y.im / y.re;
            const Real d = y.re + y.im * r;
            return {(x.re + x.im * r) / d, (x.im - x.re * r) / d};
        }
        const Real r = y.re / y.im;
        const Real d = y.re * r + y.im;
        return {(x.re * r + x.im) / d, (x.im * r - x.re) / d};
    }
    Real norm() const {
        using std::hypot;
        return hypot(re, im);
    }
};

/// Horner evaluation of p and p' at z.
template <class Real, class Z>
std::pair<Z, Z> horner_with_derivative(std::span<const Real> p, const Z& z) {
    Z f{}, df{};
    if constexpr (std::is_same_v<Z, Complex<Real>>) {
        f = Z{p[0], Real(0)};
        df = Z{Real(0), Real(0)};
        for (std::size_t k = 1; k < p.size(); ++k) {
            df = df * z + f;
            f = f * z + Z{p[k], Real(0)};
        }
    } else {
        f = p[0];
        df = Z(0);
        for (std::size_t k = 1; k < p.size(); ++k) {
            df = df * z + f;
            f = f * z + p[k];
        }
    }
    return {f, df};
}

/// Sum |p_k| |x|^(n-k): the rounding scale of a Horner evaluation at x.
template <class Real>
Real evaluation_scale(std::span<const Real> p, const Real& x) {
    using std::abs;
    const Real ax = abs(x);
    Real s = abs(p[0]);
    for (std::size_t k = 1; k < p.size(); ++k) s = s * ax + abs(p[k]);
    return s;
}

}  // namespace detail

/// Expands prod (x - r_i) into the signed convention: a_k = e_k(r).
template <class Real>
PolyCoeffs<Real> roots_to_coeffs(const RootConfig<Real>& r) {
    return PolyCoeffs<Real>(detail::elementary_symmetric<Real>(r.roots()));
}

template <class Real>
PolyCoeffs<Real> roots_to_coeffs(const RootConfig<Real>& r, const PrecisionContext&) {
    return roots_to_coeffs(r);
}

/// All roots of a real-rooted polynomial, ascending.
///
/// Aberth-Ehrlich simultaneous iteration in complex arithmetic locates every
/// root; each real part is then polished by guarded Newton steps. A root is
/// accepted as real when |Im| <= 10^(-digits/2) times the spectral scale.
template <class Real>
RootConfig<Real> coeffs_to_roots(const PolyCoeffs<Real>& poly, const PrecisionContext& ctx) {
    using std::abs;
    using std::cos;
    using std::sin;
    using std::sqrt;
    using Cx = detail::Complex<Real>;

    const std::size_t n = poly.degree();
    if (n == 0) return RootConfig<Real>{};
    const auto a = poly.coeffs();
    if (n == 1) return RootConfig<Real>(std::vector<Real>{a[1]});

    const int digits = std::min(ctx.digits, digits_of<Real>());
    const std::vector<Real> p = detail::monomial<Real>(a);
    const std::span<const Real> ps(p);

    // Laguerre-Samuelson: real roots lie within mean +- sqrt((n-1) var).
    const Real nn(static_cast<double>(n));
    const Real mean = a[1] / nn;
    const Real sum_sq = a[1] * a[1] - Real(2) * a[2];
    const Real var = sum_sq / nn - mean * mean;
    const Real tiny = pow10<Real>(-digits) * (Real(1) + abs(mean));
    if (var <= tiny * tiny) {
        if (var < -tiny) throw NonRealRoots("coeffs_to_roots: negative root variance");
        return RootConfig<Real>(std::vector<Real>(n, mean));
    }
    const Real radius = sqrt((nn - Real(1)) * var) * Real(1.05);

    std::vector<Cx> z(n);
    const Real two_pi = Real(2) * std::numbers::pi_v<double>;
    for (std::size_t k = 0; k < n; ++k) {
        const Real theta = two_pi * Real(static_cast<double>(k)) / nn + Real(0.4);
        z[k] = Cx{mean + radius * cos(theta), radius * sin(theta)};
    }

    const Real spread = sqrt(var) + abs(mean);
    const Real step_tol = pow10<Real>(-(digits - 2)) * spread;
    const Real floor_tol = pow10<Real>(-(digits / 2)) * spread;
    std::vector<bool> done(n, false);
    std::vector<Real> last_step(n, Real(0));
    bool converged = false;
    for (int it = 0; it < ctx.max_iter; ++it) {
        std::size_t active = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (done[i]) continue;
            ++active;
            const auto [f, df] = detail::horner_with_derivative<Real, Cx>(ps, z[i]);
            if (f.re == Real(0) && f.im == Real(0)) {
                done[i] = true;
                continue;
            }
            const Cx ratio = f / df;
            Cx rep{};
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i) rep = rep + Cx{Real(1), Real(0)} / (z[i] - z[j]);
            }
            const Cx w = ratio / (Cx{Real(1), Real(0)} - ratio * rep);
            z[i] = z[i] - w;
            const Real wn = w.norm();
            // Converged, or stalled at the rounding floor.
            if (wn <= step_tol || (wn <= floor_tol && wn >= last_step[i] / Real(2))) done[i] = true;
            last_step[i] = wn;
        }
        if (active == 0) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        throw ConvergenceFailure("coeffs_to_roots: Aberth iteration exceeded " +
                                 std::to_string(ctx.max_iter) + " iterations");
    }

    Real scale(0);
    for (const auto& zi : z) scale = std::max(scale, zi.norm());
    const Real imag_tol = pow10<Real>(-digits / 2) * std::max(scale, Real(1));
    std::vector<Real> roots(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (abs(z[i].im) > imag_tol) {
            throw NonRealRoots("coeffs_to_roots: root with imaginary part " +
                               std::to_string(to_double(z[i].im)));
        }
        roots[i] = z[i].re;
    }
    std::sort(roots.begin(), roots.end());

    // Newton polish; a step is taken only if it stays within a quarter of the
    // distance to the neighbouring roots and does not increase the residual.
    const Real tol = std::max(Real(ctx.newton_tol), pow10<Real>(-(digits_of<Real>() - 5)));
    std::vector<Real> polished = roots;
    for (std::size_t i = 0; i < n; ++i) {
        Real left_gap = i > 0 ? roots[i] - roots[i - 1] : Real(-1);
        Real right_gap = i + 1 < n ? roots[i + 1] - roots[i] : Real(-1);
        Real guard = std::max(left_gap, right_gap);
        if (left_gap > Real(0)) guard = std::min(guard, left_gap);
        if (right_gap > Real(0)) guard = std::min(guard, right_gap);
        guard = guard > Real(0) ? guard / Real(4) : spread;

        Real x = roots[i];
        auto [f, df] = detail::horner_with_derivative<Real, Real>(ps, x);
        for (int it = 0; it < 8 && f != Real(0) && df != Real(0); ++it) {
            const Real step = f / df;
            if (abs(step) > guard) break;
            const Real x_new = x - step;
            const auto [f_new, df_new] = detail::horner_with_derivative<Real, Real>(ps, x_new);
            if (abs(f_new) >= abs(f)) break;
            x = x_new;
            f = f_new;
            df = df_new;
            if (abs(step) <= tol * std::max(abs(x), Real(1))) break;
        }
        const Real residual_scale = detail::evaluation_scale<Real>(ps, x);
        if (abs(f) > tol * residual_scale) {
            throw ConvergenceFailure("coeffs_to_roots: residual " + std::to_string(to_double(abs(f) / residual_scale)) +
                                     " above tolerance after polishing");
        }
        polished[i] = x;
    }
    std::sort(polished.begin(), polished.end());
    return RootConfig<Real>(std::move(polished));
}

/// Mean of the roots.
template <class Real>
Real mean_of(std::span<const Real> r) {
    Real s(0);
    for (const auto& x : r) s += x;
    return s / Real(static_cast<double>(r.size()));
}

/// Mean-removed second moment (1/n) sum (r_i - mean)^2.
template <class Real>
Real variance_of(std::span<const Real> r) {
    const Real m = mean_of(r);
    Real s(0);
    for (const auto& x : r) s += (x - m) * (x - m);
    return s / Real(static_cast<double>(r.size()));
}

}  // namespace ffstam
