#pragma once

// Working-precision contract shared by every numerical module.
//
// All algorithms are templates over a scalar type `Real`. The search path uses
// `double`; the audits use fixed-precision MPFR numbers selected from a ladder
// of compile-time precisions. `PrecisionContext` is a plain value: it names a
// digit count and tolerances, and `with_precision` maps it onto the smallest
// ladder rung that covers the requested digits.

#include <boost/multiprecision/mpfr.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>
#include <type_traits>

#include "ffstam/errors.hpp"

namespace ffstam {

namespace mp = boost::multiprecision;

template <unsigned Digits>
using mpfr_real = mp::number<mp::mpfr_float_backend<Digits>, mp::et_off>;

/// Decimal digits carried by a scalar type.
template <class Real>
constexpr int digits_of() {
    return std::numeric_limits<Real>::digits10;
}

/// Largest digit count served by the ladder.
inline constexpr int kMaxLadderDigits = 220;

struct PrecisionContext {
    int digits = 30;
    double newton_tol = 1e-25;
    int max_iter = 500;

    /// Context with tolerances derived from `d` digits.
    static PrecisionContext with_digits(int d) {
        PrecisionContext ctx;
        ctx.digits = d;
        ctx.newton_tol = std::max(std::pow(10.0, -(d - 5)), 1e-300);
        ctx.max_iter = 500;
        ctx.validate();
        return ctx;
    }

    /// Default context, honouring the FFSTAM_DIGITS environment override.
    static PrecisionContext from_environment(int fallback_digits = 30) {
        if (const char* env = std::getenv("FFSTAM_DIGITS"); env != nullptr && *env != '\0') {
            char* end = nullptr;
            const long d = std::strtol(env, &end, 10);
            if (end == env || *end != '\0') {
                throw InvalidArgument("FFSTAM_DIGITS is not an integer: " + std::string(env));
            }
            return with_digits(static_cast<int>(d));
        }
        return with_digits(fallback_digits);
    }

    void validate() const {
        if (digits < 15) {
            throw InvalidArgument("PrecisionContext: digits must be >= 15, got " +
                                  std::to_string(digits));
        }
        if (!(newton_tol > 0.0)) {
            throw InvalidArgument("PrecisionContext: newton_tol must be positive");
        }
        if (max_iter < 1) {
            throw InvalidArgument("PrecisionContext: max_iter must be >= 1");
        }
    }
};

/// Invoke `fn.template operator()<Real>()` with the smallest scalar type that
/// carries at least `ctx.digits` decimal digits.
template <class Fn>
decltype(auto) with_precision(const PrecisionContext& ctx, Fn&& fn) {
    ctx.validate();
    const int d = ctx.digits;
    if (d <= 15) return fn.template operator()<double>();
    if (d <= 30) return fn.template operator()<mpfr_real<30>>();
    if (d <= 50) return fn.template operator()<mpfr_real<50>>();
    if (d <= 60) return fn.template operator()<mpfr_real<60>>();
    if (d <= 80) return fn.template operator()<mpfr_real<80>>();
    if (d <= 100) return fn.template operator()<mpfr_real<100>>();
    if (d <= 120) return fn.template operator()<mpfr_real<120>>();
    if (d <= 160) return fn.template operator()<mpfr_real<160>>();
    if (d <= kMaxLadderDigits) return fn.template operator()<mpfr_real<kMaxLadderDigits>>();
    throw PrecisionUnavailable("no scalar type with " + std::to_string(d) + " digits (max " +
                               std::to_string(kMaxLadderDigits) + ")");
}

template <class Real>
double to_double(const Real& x) {
    return static_cast<double>(x);
}

/// 10^e in the working type.
template <class Real>
Real pow10(int e) {
    using std::pow;
    return pow(Real(10), Real(e));
}

/// |x|^p evaluated as exp(p log|x|), with |x| below 10^-digits treated as 0.
template <class Real>
Real pow_abs(const Real& x, const Real& p) {
    using std::abs;
    using std::exp;
    using std::log;
    static const Real zero_guard = pow10<Real>(-digits_of<Real>());
    const Real ax = abs(x);
    if (ax < zero_guard) return Real(0);
    if (p == Real(2)) return ax * ax;
    return exp(p * log(ax));
}

/// Positive x raised to a real power.
template <class Real>
Real pow_pos(const Real& x, const Real& e) {
    using std::exp;
    using std::log;
    return exp(e * log(x));
}

}  // namespace ffstam
