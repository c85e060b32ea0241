#pragma once

// The coupling matrix E_n = d gamma / d alpha at alpha = beta = h^(n), its
// spectrum on the mean-zero subspace W = 1^perp, and derived checks.
//
// E_n is assembled by implicit differentiation of P(gamma_i(alpha)) = 0:
// d gamma_i / d alpha_j = -dP_j(gamma_i) / P'(gamma_i), where dP_j is the
// derivative of the convolution polynomial with respect to alpha_j. Through
// a_k = e_k(alpha), d a_k / d alpha_j = e_{k-1}(alpha without alpha_j).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "ffstam/errors.hpp"
#include "ffstam/finite_free.hpp"
#include "ffstam/fisher_stam.hpp"
#include "ffstam/hermite.hpp"
#include "ffstam/linalg.hpp"
#include "ffstam/precision.hpp"
#include "ffstam/realroot.hpp"

namespace ffstam {

template <class Real>
struct CouplingMatrix {
    std::size_t n = 0;
    Matrix<Real> E;
    int digits_used = 0;
};

/// max over rows and columns of |sum - 1|.
template <class Real>
Real stochasticity_defect(const Matrix<Real>& E) {
    using std::abs;
    Real worst(0);
    for (std::size_t i = 0; i < E.rows(); ++i) {
        Real row(0), col(0);
        for (std::size_t j = 0; j < E.cols(); ++j) {
            row += E(i, j);
            col += E(j, i);
        }
        worst = std::max({worst, Real(abs(row - Real(1))), Real(abs(col - Real(1)))});
    }
    return worst;
}

/// E_n at the Hermite diagonal. Throws PrecisionExhausted when the row or
/// column sums miss 1 by more than 10^{-digits/4}.
template <class Real>
CouplingMatrix<Real> coupling_matrix(std::size_t n, const PrecisionContext& ctx) {
    using std::sqrt;
    if (n < 2) throw InvalidArgument("coupling_matrix: n must be >= 2");
    const RootConfig<Real> h = hermite_roots<Real>(n, ctx);
    const PolyCoeffs<Real> a = roots_to_coeffs(h);
    const PolyCoeffs<Real> c = boxplus_coeffs(a, a);
    const auto& w = detail::rounded_weights<Real>(n);
    const Real root2 = sqrt(Real(2));

    // P'(gamma_i) at gamma = sqrt(2) h.
    std::vector<Real> gamma(n), dP(n);
    const auto cm = detail::monomial(c.coeffs());
    for (std::size_t i = 0; i < n; ++i) {
        gamma[i] = root2 * h[i];
        dP[i] = detail::horner_with_derivative<Real, Real>(cm, gamma[i]).second;
    }

    CouplingMatrix<Real> out{n, Matrix<Real>(n, n), digits_of<Real>()};
    std::vector<Real> da(n + 1), dc(n + 1);
    for (std::size_t j = 0; j < n; ++j) {
        // e_k(h without h_j) by synthetic division.
        da[0] = Real(0);
        Real prev(1);
        for (std::size_t k = 1; k <= n; ++k) {
            da[k] = prev;
            prev = a[k] - h[j] * prev;
        }
        for (std::size_t k = 0; k <= n; ++k) {
            Real acc(0);
            for (std::size_t i = 1; i <= k; ++i) acc += w[i * (n + 1) + (k - i)] * da[i] * a[k - i];
            dc[k] = acc;
        }
        const auto dm = detail::monomial(std::span<const Real>(dc));
        for (std::size_t i = 0; i < n; ++i) {
            const Real dval = detail::horner_with_derivative<Real, Real>(dm, gamma[i]).first;
            out.E(i, j) = -dval / dP[i];
        }
    }

    const Real defect = stochasticity_defect(out.E);
    if (defect > pow10<Real>(-(digits_of<Real>() / 4))) {
        throw PrecisionExhausted("coupling_matrix: stochasticity defect " + std::to_string(to_double(defect)) +
                                 " at " + std::to_string(digits_of<Real>()) + " digits, n=" + std::to_string(n));
    }
    return out;
}

/// Orthonormal basis of W = 1^perp as the columns of an n x (n-1) matrix
/// (Helmert contrasts).
template <class Real>
Matrix<Real> meanzero_basis(std::size_t n) {
    using std::sqrt;
    Matrix<Real> Q(n, n - 1);
    for (std::size_t k = 1; k < n; ++k) {
        const Real kk(static_cast<double>(k));
        const Real inv = Real(1) / sqrt(kk * (kk + Real(1)));
        for (std::size_t i = 0; i < k; ++i) Q(i, k - 1) = inv;
        Q(k, k - 1) = -kk * inv;
    }
    return Q;
}

/// Q^T E Q, the operator E restricted to W in the Helmert basis.
template <class Real>
Matrix<Real> restrict_to_meanzero(const Matrix<Real>& E) {
    const Matrix<Real> Q = meanzero_basis<Real>(E.rows());
    return Q.transpose() * E * Q;
}

template <class Real>
SvdResult<Real> meanzero_svd(const Matrix<Real>& E) {
    return jacobi_svd(restrict_to_meanzero(E));
}

/// Descending singular values of E restricted to W.
template <class Real>
std::vector<Real> meanzero_singular_values(const CouplingMatrix<Real>& E) {
    return meanzero_svd(E.E).sigma;
}

template <class Real>
std::vector<Real> meanzero_singular_values(const Matrix<Real>& E) {
    return meanzero_svd(E).sigma;
}

/// ||E - E^T||_F / ||E||_F.
template <class Real>
Real symmetry_defect(const Matrix<Real>& E) {
    using std::sqrt;
    Real num(0);
    for (std::size_t i = 0; i < E.rows(); ++i)
        for (std::size_t j = 0; j < E.cols(); ++j) num += (E(i, j) - E(j, i)) * (E(i, j) - E(j, i));
    return sqrt(num) / E.frobenius_norm();
}

/// Working digits used by the audit: 60 up to n = 10, then 20 more per
/// additional 10 in n.
inline int default_audit_digits(std::size_t n) {
    if (n <= 10) return 60;
    return 60 + 20 * static_cast<int>((n - 1) / 10);
}

struct SpectrumAudit {
    std::size_t n = 0;
    int digits = 0;
    std::vector<double> sigma;  // descending, length n-1
    std::vector<std::string> sigma_text;  // same values at 20 significant digits
    double max_rel_err_first10 = 0.0;
    double symmetry_defect = 0.0;
    double stochasticity_defect = 0.0;
    std::vector<double> eigenvalues;  // supplementary, real parts, descending
};

namespace detail {

template <class Real>
std::string to_text(const Real& x, int digits = 20) {
    if constexpr (std::is_same_v<Real, double>) {
        std::ostringstream os;
        os.precision(std::min(digits, 17));
        os << x;
        return os.str();
    } else {
        return x.str(digits);
    }
}

}  // namespace detail

template <class Real>
SpectrumAudit audit_one(std::size_t n, const PrecisionContext& ctx) {
    const auto cm = coupling_matrix<Real>(n, ctx);
    const Matrix<Real> M = restrict_to_meanzero(cm.E);
    const auto svd = jacobi_svd(M);

    SpectrumAudit rep;
    rep.n = n;
    rep.digits = ctx.digits;
    Real worst(0);
    const std::size_t modes = std::min<std::size_t>(10, n - 1);
    for (std::size_t k = 0; k < svd.sigma.size(); ++k) {
        rep.sigma.push_back(to_double(svd.sigma[k]));
        rep.sigma_text.push_back(detail::to_text(svd.sigma[k]));
        if (k < modes) {
            using std::abs;
            using std::pow;
            const Real target = pow(Real(2), Real(-0.5) * Real(static_cast<double>(k + 1)));
            worst = std::max(worst, Real(abs(svd.sigma[k] - target) / target));
        }
    }
    rep.max_rel_err_first10 = to_double(worst);
    rep.symmetry_defect = to_double(symmetry_defect(cm.E));
    rep.stochasticity_defect = to_double(stochasticity_defect(cm.E));

    Eigen::MatrixXd Md(M.rows(), M.cols());
    for (std::size_t i = 0; i < M.rows(); ++i)
        for (std::size_t j = 0; j < M.cols(); ++j) Md(i, j) = to_double(M(i, j));
    const Eigen::VectorXcd ev = Md.eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i) rep.eigenvalues.push_back(ev[i].real());
    std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end(), std::greater<>());
    return rep;
}

/// Per-n spectrum audit. `schedule` maps n to working digits; missing entries
/// fall back to default_audit_digits.
inline std::vector<SpectrumAudit> spectrum_audit(const std::vector<std::size_t>& n_list,
                                                 const std::map<std::size_t, int>& schedule = {}) {
    std::vector<SpectrumAudit> out;
    for (std::size_t n : n_list) {
        const auto it = schedule.find(n);
        const int d = it != schedule.end() ? it->second : default_audit_digits(n);
        const auto ctx = PrecisionContext::with_digits(d);
        out.push_back(with_precision(ctx, [&]<class Real>() { return audit_one<Real>(n, ctx); }));
    }
    return out;
}

/// eta_p = ||E s||_p / ||s||_p with s the score vector of h^(n).
template <class Real>
Real contraction_ratio(std::size_t n, const Real& p, const PrecisionContext& ctx) {
    detail::check_p(p);
    const auto cm = coupling_matrix<Real>(n, ctx);
    const auto s = score_vector(hermite_roots<Real>(n, ctx));
    const auto es = cm.E * s;
    return pow_pos(lp_power(es, p) / lp_power(s, p), Real(1) / p);
}

template <class Real>
struct FullJacobianCheck {
    std::vector<Real> sigma;     // all 2(n-1) singular values, descending
    std::size_t kernel_dim = 0;  // count of values below 10^{-digits/2}
    Real antidiagonal_residual{};  // max ||J (q, -q)|| over basis vectors q of W
};

/// Singular values of J restricted to V = W + W, (u, v) -> E (u + v), in
/// the Helmert basis: the (n-1) x 2(n-1) matrix [M M].
template <class Real>
FullJacobianCheck<Real> full_jacobian_svd_check(std::size_t n, const PrecisionContext& ctx) {
    const auto cm = coupling_matrix<Real>(n, ctx);
    const Matrix<Real> M = restrict_to_meanzero(cm.E);
    const std::size_t m = n - 1;
    Matrix<Real> J(m, 2 * m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) J(i, j) = J(i, j + m) = M(i, j);

    FullJacobianCheck<Real> out;
    out.sigma = jacobi_svd(J).sigma;
    const Real zero_tol = pow10<Real>(-(digits_of<Real>() / 2));
    for (const auto& s : out.sigma)
        if (s <= zero_tol) ++out.kernel_dim;

    // Anti-diagonal modes (q, -q) in ambient coordinates go through E(u + v).
    const Matrix<Real> Q = meanzero_basis<Real>(n);
    for (std::size_t k = 0; k < m; ++k) {
        const auto q = Q.column(k);
        std::vector<Real> u(q), v(q);
        for (auto& x : v) x = -x;
        std::vector<Real> sum(n);
        for (std::size_t i = 0; i < n; ++i) sum[i] = u[i] + v[i];
        out.antidiagonal_residual = std::max(out.antidiagonal_residual, norm2(cm.E * sum));
    }
    return out;
}

/// Singular directions of E on W mapped back to R^n, scaled so that
/// (1/sqrt(n)) ||u|| = 1, with the sign fixed by sum_i i u_i > 0.
template <class Real>
std::vector<std::vector<Real>> meanzero_singular_directions(std::size_t n, const PrecisionContext& ctx) {
    using std::sqrt;
    const auto cm = coupling_matrix<Real>(n, ctx);
    const auto svd = meanzero_svd(cm.E);
    const Matrix<Real> Q = meanzero_basis<Real>(n);
    std::vector<std::vector<Real>> dirs;
    for (std::size_t k = 0; k < n - 1; ++k) {
        auto u = Q * svd.V.column(k);
        Real trend(0);
        for (std::size_t i = 0; i < n; ++i) trend += Real(static_cast<double>(i)) * u[i];
        const Real scale = sqrt(Real(static_cast<double>(n))) / norm2(u) * (trend < Real(0) ? Real(-1) : Real(1));
        for (auto& x : u) x *= scale;
        dirs.push_back(std::move(u));
    }
    return dirs;
}

}  // namespace ffstam
