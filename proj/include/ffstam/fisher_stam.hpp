#pragma once

// Score vectors, l^p Fisher information in its three normalizations, and the
// p-Stam deficits g_p and rho_p.

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "ffstam/errors.hpp"
#include "ffstam/finite_free.hpp"
#include "ffstam/hermite.hpp"
#include "ffstam/precision.hpp"
#include "ffstam/realroot.hpp"

namespace ffstam {

/// s_i = sum_{j != i} 1 / (r_i - r_j).
///
/// Throws RepeatedRoots when an adjacent gap is below 1e-12 times the root
/// scale.
template <class Real>
std::vector<Real> score_vector(const RootConfig<Real>& r) {
    const std::size_t n = r.degree();
    if (n >= 2) {
        const Real scale = std::max(r.scale(), Real(1e-300));
        if (r.min_gap() <= Real(1e-12) * scale) {
            throw RepeatedRoots("score_vector: adjacent gap below 1e-12 x scale");
        }
    }
    std::vector<Real> s(n, Real(0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const Real inv = Real(1) / (r[i] - r[j]);
            s[i] += inv;
            s[j] -= inv;
        }
    }
    return s;
}

/// ||v||_p^p.
template <class Real>
Real lp_power(const std::vector<Real>& v, const Real& p) {
    Real sum(0);
    for (const auto& x : v) sum += pow_abs(x, p);
    return sum;
}

namespace detail {

template <class Real>
void check_p(const Real& p) {
    if (!(p > Real(1))) throw InvalidArgument("p must exceed 1, got " + std::to_string(to_double(p)));
}

}  // namespace detail

/// Unnormalized p-Fisher information ||s(r)||_p^p.
template <class Real>
Real phi_np(const RootConfig<Real>& r, const Real& p) {
    detail::check_p(p);
    return lp_power(score_vector(r), p);
}

/// Phi_n(f) = 4 / (n (n-1)^2) ||s||_2^2.
template <class Real>
Real phi_n_normalized(const RootConfig<Real>& r) {
    const Real n(static_cast<double>(r.degree()));
    return Real(4) / (n * (n - Real(1)) * (n - Real(1))) * phi_np(r, Real(2));
}

/// (1/n) sum |2/(n-1) s_i|^p. Search-time conditioning only.
template <class Real>
Real phi_tilde(const RootConfig<Real>& r, const Real& p) {
    detail::check_p(p);
    const Real n(static_cast<double>(r.degree()));
    std::vector<Real> s = score_vector(r);
    for (auto& x : s) x *= Real(2) / (n - Real(1));
    return lp_power(s, p) / n;
}

template <class Real>
struct DeficitReport {
    Real p{};
    Real g_p{};
    Real A_p{};
    Real rho_p{};
    Real phi_f{};
    Real phi_g{};
    Real phi_conv{};
};

/// Phi^{-1/(p-1)}.
template <class Real>
Real reciprocal_information(const Real& phi, const Real& p) {
    return pow_pos(phi, Real(-1) / (p - Real(1)));
}

/// g_p and rho_p for the pair, with gamma computed through the root map.
template <class Real>
DeficitReport<Real> stam_deficit(const RootConfig<Real>& alpha, const RootConfig<Real>& beta, const Real& p,
                                 const PrecisionContext& ctx) {
    detail::check_p(p);
    if (alpha.degree() != beta.degree()) {
        throw DegreeMismatch("stam_deficit: degrees differ");
    }
    DeficitReport<Real> rep;
    rep.p = p;
    rep.phi_f = phi_np(alpha, p);
    rep.phi_g = phi_np(beta, p);
    const RootConfig<Real> gamma = omega(alpha, beta, ctx);
    rep.phi_conv = phi_np(gamma, p);
    const Real f_a = reciprocal_information(rep.phi_f, p);
    const Real f_b = reciprocal_information(rep.phi_g, p);
    const Real f_c = reciprocal_information(rep.phi_conv, p);
    rep.A_p = f_a + f_b;
    rep.g_p = f_c - f_a - f_b;
    rep.rho_p = rep.g_p / rep.A_p;
    return rep;
}

/// g_p(h, h) from the score-eigenvector relation E_n s = 2^{-1/2} s:
/// ||s||_p^{-p/(p-1)} [ (eta^p)^{-1/(p-1)} - 2 ] with eta = 2^{-1/2}.
template <class Real>
Real hermite_pair_deficit_closed_form(std::size_t n, const Real& p, const PrecisionContext& ctx) {
    detail::check_p(p);
    if (n < 2) throw InvalidArgument("hermite_pair_deficit_closed_form: n must be >= 2");
    const RootConfig<Real> h = hermite_roots<Real>(n, ctx);
    const Real norm_pp = lp_power(score_vector(h), p);
    const Real inv = Real(-1) / (p - Real(1));
    const Real eta_p = pow_pos(Real(2), Real(-0.5) * p);
    return pow_pos(norm_pp, inv) * (pow_pos(eta_p, inv) - Real(2));
}

}  // namespace ffstam
