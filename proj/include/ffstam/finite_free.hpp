#pragma once

// Finite free additive convolution at coefficient level and the induced root
// map (alpha, beta) -> gamma.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "ffstam/errors.hpp"
#include "ffstam/precision.hpp"
#include "ffstam/realroot.hpp"

namespace ffstam {

/// Exact weights w[i][j] = (n-i)!(n-j)! / (n! (n-i-j)!) for i + j <= n.
class ConvolutionWeights {
public:
    using Rational = mp::cpp_rational;

    explicit ConvolutionWeights(std::size_t n) : n_(n), w_((n + 1) * (n + 1), Rational(0)) {
        std::vector<mp::cpp_int> fact(n + 1);
        fact[0] = 1;
        for (std::size_t k = 1; k <= n; ++k) fact[k] = fact[k - 1] * static_cast<unsigned>(k);
        for (std::size_t i = 0; i <= n; ++i) {
            for (std::size_t j = 0; i + j <= n; ++j) {
                w_[i * (n + 1) + j] = Rational(fact[n - i] * fact[n - j], fact[n] * fact[n - i - j]);
            }
        }
    }

    std::size_t degree() const noexcept { return n_; }
    const Rational& operator()(std::size_t i, std::size_t j) const { return w_[i * (n_ + 1) + j]; }

    /// Shared, lazily built weight table for degree n.
    static const ConvolutionWeights& get(std::size_t n) {
        static std::mutex mutex;
        static std::map<std::size_t, std::unique_ptr<ConvolutionWeights>> cache;
        std::lock_guard lock(mutex);
        auto& slot = cache[n];
        if (!slot) slot = std::make_unique<ConvolutionWeights>(n);
        return *slot;
    }

private:
    std::size_t n_;
    std::vector<Rational> w_;
};

namespace detail {

/// Weights rounded once to `Real`, cached per (Real, n).
template <class Real>
const std::vector<Real>& rounded_weights(std::size_t n) {
    static std::mutex mutex;
    static std::map<std::size_t, std::unique_ptr<std::vector<Real>>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[n];
    if (!slot) {
        const auto& exact = ConvolutionWeights::get(n);
        slot = std::make_unique<std::vector<Real>>((n + 1) * (n + 1), Real(0));
        for (std::size_t i = 0; i <= n; ++i) {
            for (std::size_t j = 0; i + j <= n; ++j) {
                const auto& q = exact(i, j);
                if constexpr (std::is_same_v<Real, double>) {
                    (*slot)[i * (n + 1) + j] = static_cast<double>(q);
                } else {
                    (*slot)[i * (n + 1) + j] = Real(numerator(q)) / Real(denominator(q));
                }
            }
        }
    }
    return *slot;
}

}  // namespace detail

/// c_k = sum_{i+j=k} w_ij a_i b_j.
///
/// Symmetric terms are paired as w_ij (a_i b_j + a_j b_i), so swapping the
/// arguments reproduces the result bit for bit.
template <class Real>
PolyCoeffs<Real> boxplus_coeffs(const PolyCoeffs<Real>& a, const PolyCoeffs<Real>& b) {
    const std::size_t n = a.degree();
    if (b.degree() != n) {
        throw DegreeMismatch("boxplus_coeffs: degrees " + std::to_string(n) + " and " +
                             std::to_string(b.degree()));
    }
    const auto& w = detail::rounded_weights<Real>(n);
    std::vector<Real> c(n + 1, Real(0));
    for (std::size_t k = 0; k <= n; ++k) {
        Real acc(0);
        for (std::size_t i = 0; 2 * i < k; ++i) {
            const std::size_t j = k - i;
            acc += w[i * (n + 1) + j] * (a[i] * b[j] + a[j] * b[i]);
        }
        if (k % 2 == 0) {
            const std::size_t m = k / 2;
            acc += w[m * (n + 1) + m] * (a[m] * b[m]);
        }
        c[k] = acc;
    }
    c[0] = Real(1);
    return PolyCoeffs<Real>(std::move(c));
}

template <class Real>
struct ConvolutionResult {
    PolyCoeffs<Real> coeffs;
    RootConfig<Real> gamma;
};

template <class Real>
ConvolutionResult<Real> convolve(const RootConfig<Real>& alpha, const RootConfig<Real>& beta,
                                 const PrecisionContext& ctx) {
    if (alpha.degree() != beta.degree()) {
        throw DegreeMismatch("omega: degrees " + std::to_string(alpha.degree()) + " and " +
                             std::to_string(beta.degree()));
    }
    auto c = boxplus_coeffs(roots_to_coeffs(alpha), roots_to_coeffs(beta));
    auto gamma = coeffs_to_roots(c, ctx);
    return {std::move(c), std::move(gamma)};
}

/// Root map (alpha, beta) -> gamma = roots of f boxplus_n g.
template <class Real>
RootConfig<Real> omega(const RootConfig<Real>& alpha, const RootConfig<Real>& beta,
                       const PrecisionContext& ctx) {
    return convolve(alpha, beta, ctx).gamma;
}

}  // namespace ffstam
