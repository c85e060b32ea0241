#pragma once

// Reference configurations (Hermite and the family library), shape
// normalization, and the distance and symmetry diagnostics used to describe
// extremal pairs.
//
// Reversal convention: rev(r) lists the entries in reverse order without
// negation, so -rev(r) is the reflection of r about 0.

#include <boost/math/constants/constants.hpp>

#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "ffstam/errors.hpp"
#include "ffstam/hermite.hpp"
#include "ffstam/linalg.hpp"
#include "ffstam/precision.hpp"
#include "ffstam/realroot.hpp"

namespace ffstam {

/// (r - mean) / sqrt(variance). Throws DegenerateConfig when the variance is
/// below 1e-24.
template <class Real>
RootConfig<Real> normalize_shape(const RootConfig<Real>& r) {
    using std::sqrt;
    const Real m = mean_of(r.roots());
    const Real v = variance_of(r.roots());
    if (!(v >= Real(1e-24))) throw DegenerateConfig("normalize_shape: variance below 1e-24");
    const Real s = sqrt(v);
    std::vector<Real> out(r.values());
    for (auto& x : out) x = (x - m) / s;
    return RootConfig<Real>(std::move(out));
}

template <class Real>
std::vector<Real> reversed(std::span<const Real> r) {
    return std::vector<Real>(r.rbegin(), r.rend());
}

/// (1/sqrt(n)) ||x - y||_2.
template <class Real>
Real rms_distance(std::span<const Real> x, std::span<const Real> y) {
    using std::sqrt;
    if (x.size() != y.size()) throw DegreeMismatch("rms_distance: lengths differ");
    Real s(0);
    for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
    return sqrt(s / Real(static_cast<double>(x.size())));
}

namespace detail {

/// h^(n) in `Real`, computed once per n.
template <class Real>
const RootConfig<Real>& cached_hermite(std::size_t n) {
    static std::mutex mutex;
    static std::map<std::size_t, std::unique_ptr<RootConfig<Real>>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[n];
    if (!slot) {
        const auto ctx = PrecisionContext::with_digits(std::max(digits_of<Real>(), 15));
        slot = std::make_unique<RootConfig<Real>>(hermite_roots<Real>(n, ctx));
    }
    return *slot;
}

}  // namespace detail

/// d_H(r) = (1/sqrt(n)) min(||r - h||, ||r - rev(h)||); r is expected to be normalized.
template <class Real>
Real hermite_distance(std::span<const Real> r) {
    const auto& h = detail::cached_hermite<Real>(r.size());
    const auto hr = reversed(h.roots());
    return std::min(rms_distance(r, h.roots()), rms_distance<Real>(r, hr));
}

template <class Real>
Real hermite_distance(const RootConfig<Real>& r) {
    return hermite_distance(r.roots());
}

template <class Real>
struct PairDiagnostics {
    Real d_H_alpha{};
    Real d_H_beta{};
    Real D{};
    Real d_PQ{};
};

/// Hermite distances, D = d_H(alpha)^2 + d_H(beta)^2 and d_PQ for a normalized pair.
template <class Real>
PairDiagnostics<Real> pair_diagnostics(const RootConfig<Real>& alpha, const RootConfig<Real>& beta) {
    PairDiagnostics<Real> d;
    d.d_H_alpha = hermite_distance(alpha);
    d.d_H_beta = hermite_distance(beta);
    d.D = d.d_H_alpha * d.d_H_alpha + d.d_H_beta * d.d_H_beta;
    d.d_PQ = rms_distance(alpha.roots(), beta.roots());
    return d;
}

// ---------------------------------------------------------------------------
// Family library

enum class Family { Hermite, SemicircleQuantiles, UniformSpacing, Jacobi, TwoBlockUniform };

/// Family identifier with parameters. For TwoBlockUniform a gap_ratio <= 0
/// means "fit per sample".
struct FamilySpec {
    Family kind = Family::Hermite;
    double a = 0.0;
    double b = 0.0;
    double gap_ratio = 0.0;

    std::string name() const {
        switch (kind) {
            case Family::Hermite: return "Hermite";
            case Family::SemicircleQuantiles: return "SemicircleQuantiles";
            case Family::UniformSpacing: return "UniformSpacing";
            case Family::TwoBlockUniform: return "TwoBlockUniform";
            case Family::Jacobi: {
                std::ostringstream os;
                os << "Jacobi(" << a << "," << b << ")";
                return os.str();
            }
        }
        return "?";
    }

    friend bool operator==(const FamilySpec&, const FamilySpec&) = default;
};

/// Parses "Hermite", "SemicircleQuantiles", "UniformSpacing", "TwoBlockUniform"
/// or "Jacobi(a,b)". Short aliases He, SC, U, 2BU are accepted.
inline FamilySpec parse_family(const std::string& s) {
    if (s == "Hermite" || s == "He") return {Family::Hermite};
    if (s == "SemicircleQuantiles" || s == "SC") return {Family::SemicircleQuantiles};
    if (s == "UniformSpacing" || s == "U") return {Family::UniformSpacing};
    if (s == "TwoBlockUniform" || s == "2BU") return {Family::TwoBlockUniform};
    if (s.rfind("Jacobi(", 0) == 0 && s.back() == ')') {
        std::istringstream is(s.substr(7, s.size() - 8));
        double a = 0, b = 0;
        char comma = 0;
        if (is >> a >> comma >> b && comma == ',') return {Family::Jacobi, a, b};
    }
    throw InvalidFamilyParams("unknown family '" + s + "'");
}

/// Hermite, semicircle quantiles, uniform spacing, Jacobi at
/// (a,b) in {(0,0), (.5,.5), (1,1), (2,2)} and two-block uniform.
inline std::vector<FamilySpec> default_library() {
    return {
        {Family::Hermite},
        {Family::SemicircleQuantiles},
        {Family::UniformSpacing},
        {Family::Jacobi, 0.0, 0.0},
        {Family::Jacobi, 0.5, 0.5},
        {Family::Jacobi, 1.0, 1.0},
        {Family::Jacobi, 2.0, 2.0},
        {Family::TwoBlockUniform},
    };
}

template <class Real>
struct FamilyRef {
    FamilySpec spec;
    std::size_t n = 0;
    RootConfig<Real> ref_roots;
};

namespace detail {

/// Unit-variance semicircle CDF on [-2, 2].
template <class Real>
Real semicircle_cdf(const Real& x) {
    using std::asin;
    using std::sqrt;
    const Real pi = boost::math::constants::pi<Real>();
    return Real(0.5) + x * sqrt(Real(4) - x * x) / (Real(4) * pi) + asin(x / Real(2)) / pi;
}

template <class Real>
std::vector<Real> semicircle_quantiles(std::size_t n) {
    std::vector<Real> r(n);
    const Real tol(1e-12);
    for (std::size_t i = 0; i < n; ++i) {
        const Real target = (Real(static_cast<double>(i)) + Real(0.5)) / Real(static_cast<double>(n));
        Real lo(-2), hi(2);
        while (hi - lo > tol) {
            const Real mid = (lo + hi) / Real(2);
            if (semicircle_cdf(mid) < target) lo = mid;
            else hi = mid;
        }
        r[i] = (lo + hi) / Real(2);
    }
    return r;
}

/// Gauss-Jacobi nodes for weight (1-x)^a (1+x)^b by Golub-Welsch.
template <class Real>
std::vector<Real> gauss_jacobi_nodes(std::size_t n, double a_in, double b_in) {
    using std::sqrt;
    const Real a(a_in), b(b_in);
    Matrix<Real> T(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const Real kk(static_cast<double>(k));
        const Real s = Real(2) * kk + a + b;
        T(k, k) = (k == 0) ? (b - a) / (a + b + Real(2)) : (b * b - a * a) / (s * (s + Real(2)));
        if (k + 1 < n) {
            const Real m(static_cast<double>(k + 1));
            const Real t = Real(2) * m + a + b;
            const Real beta = Real(4) * m * (m + a) * (m + b) * (m + a + b) / (t * t * (t + Real(1)) * (t - Real(1)));
            T(k, k + 1) = T(k + 1, k) = sqrt(beta);
        }
    }
    return jacobi_eigen_symmetric(T).values;
}

template <class Real>
std::vector<Real> two_block(std::size_t n, const Real& gap_ratio) {
    const std::size_t left = n / 2;
    std::vector<Real> r(n);
    for (std::size_t i = 0; i < left; ++i) r[i] = Real(static_cast<double>(i));
    for (std::size_t i = left; i < n; ++i) {
        r[i] = Real(static_cast<double>(i - 1)) + (left > 0 ? gap_ratio : Real(0));
    }
    return r;
}

}  // namespace detail

/// Builds the normalized reference configuration of a family at degree n.
template <class Real>
FamilyRef<Real> family_reference(const FamilySpec& spec, std::size_t n, const PrecisionContext& ctx) {
    if (n < 2) throw InvalidFamilyParams("family_reference: n must be >= 2");
    std::vector<Real> r;
    switch (spec.kind) {
        case Family::Hermite: return {spec, n, hermite_roots<Real>(n, ctx)};
        case Family::SemicircleQuantiles: r = detail::semicircle_quantiles<Real>(n); break;
        case Family::UniformSpacing:
            for (std::size_t i = 0; i < n; ++i) r.push_back(Real(static_cast<double>(i)));
            break;
        case Family::Jacobi:
            if (!(spec.a > -1.0) || !(spec.b > -1.0)) {
                throw InvalidFamilyParams("Jacobi parameters must exceed -1");
            }
            r = detail::gauss_jacobi_nodes<Real>(n, spec.a, spec.b);
            break;
        case Family::TwoBlockUniform:
            if (!(spec.gap_ratio > 0.0) || !std::isfinite(spec.gap_ratio)) {
                throw InvalidFamilyParams("TwoBlockUniform needs a positive gap_ratio");
            }
            r = detail::two_block<Real>(n, Real(spec.gap_ratio));
            break;
    }
    return {spec, n, normalize_shape(RootConfig<Real>::from_unsorted(std::move(r)))};
}

/// d_family(r) = min_{a>0} (1/sqrt(n)) ||r - a ref||.
template <class Real>
Real family_residual(std::span<const Real> r, std::span<const Real> ref) {
    using std::sqrt;
    if (r.size() != ref.size()) throw DegreeMismatch("family_residual: lengths differ");
    Real dot(0), rr(0);
    for (std::size_t i = 0; i < r.size(); ++i) {
        dot += r[i] * ref[i];
        rr += ref[i] * ref[i];
    }
    const Real nn(static_cast<double>(r.size()));
    if (!(dot > Real(0)) || rr == Real(0)) {
        Real s(0);
        for (const auto& x : r) s += x * x;
        return sqrt(s / nn);
    }
    const Real a = dot / rr;
    Real s(0);
    for (std::size_t i = 0; i < r.size(); ++i) s += (r[i] - a * ref[i]) * (r[i] - a * ref[i]);
    return sqrt(s / nn);
}

template <class Real>
Real family_residual(const RootConfig<Real>& r, const FamilyRef<Real>& ref) {
    return family_residual(r.roots(), ref.ref_roots.roots());
}

namespace detail {

/// Golden-section minimization on [lo, hi].
template <class F>
std::pair<double, double> golden_section(F&& f, double lo, double hi, double tol = 1e-6) {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    while (hi - lo > tol) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    return f1 <= f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

inline constexpr double kGapLo = 0.5;
inline constexpr double kGapHi = 20.0;

}  // namespace detail

template <class Real>
struct FamilyFit {
    Real residual{};
    double gap_ratio = 0.0;  // fitted or given; TwoBlockUniform only
};

/// Residual of a normalized configuration against a family, fitting the
/// two-block gap over [0.5, 20] by golden section when it is not fixed.
template <class Real>
FamilyFit<Real> fit_family(const RootConfig<Real>& r, const FamilySpec& spec, const PrecisionContext& ctx) {
    const std::size_t n = r.degree();
    if (spec.kind == Family::TwoBlockUniform && !(spec.gap_ratio > 0.0)) {
        auto f = [&](double g) {
            FamilySpec s = spec;
            s.gap_ratio = g;
            return to_double(family_residual(r, family_reference<Real>(s, n, ctx)));
        };
        const auto [g, _] = detail::golden_section(f, detail::kGapLo, detail::kGapHi);
        FamilySpec s = spec;
        s.gap_ratio = g;
        return {family_residual(r, family_reference<Real>(s, n, ctx)), g};
    }
    return {family_residual(r, family_reference<Real>(spec, n, ctx)), spec.gap_ratio};
}

enum class FitMode { A, B };

namespace detail {

/// min over s > 0, t of ||s x + t - y||^2 (common positive scale and shift).
template <class Real>
Real common_affine_residual_sq(const std::vector<Real>& x, const std::vector<Real>& y) {
    const Real m(static_cast<double>(x.size()));
    Real mx(0), my(0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= m;
    my /= m;
    Real sxx(0), sxy(0), syy(0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (!(sxy > Real(0)) || sxx == Real(0)) return syy;
    const Real res = syy - sxy * sxy / sxx;
    return res > Real(0) ? res : Real(0);
}

template <class Real>
Real mode_b_residual(const RootConfig<Real>& alpha, const RootConfig<Real>& beta, const RootConfig<Real>& ref) {
    using std::sqrt;
    std::vector<Real> x(alpha.values());
    x.insert(x.end(), beta.values().begin(), beta.values().end());
    std::vector<Real> y(ref.values());
    y.insert(y.end(), ref.values().begin(), ref.values().end());
    return sqrt(common_affine_residual_sq(x, y) / Real(static_cast<double>(alpha.degree())));
}

}  // namespace detail

/// d_joint of a pair against a family.
///
/// Mode A normalizes alpha and beta separately and returns
/// sqrt(d_family(alpha)^2 + d_family(beta)^2). Mode B maps both through one
/// common positive scale and shift chosen to best match the reference, and
/// returns sqrt(min ||s [alpha; beta] + t - [ref; ref]||^2 / n), which is on
/// the same scale as Mode A.
template <class Real>
Real joint_residual(const RootConfig<Real>& alpha, const RootConfig<Real>& beta, const FamilySpec& spec,
                    FitMode mode, const PrecisionContext& ctx) {
    using std::sqrt;
    const std::size_t n = alpha.degree();
    if (beta.degree() != n) throw DegreeMismatch("joint_residual: degrees differ");
    if (mode == FitMode::A) {
        const Real da = fit_family(normalize_shape(alpha), spec, ctx).residual;
        const Real db = fit_family(normalize_shape(beta), spec, ctx).residual;
        return sqrt(da * da + db * db);
    }
    if (spec.kind == Family::TwoBlockUniform && !(spec.gap_ratio > 0.0)) {
        auto f = [&](double g) {
            FamilySpec s = spec;
            s.gap_ratio = g;
            return to_double(detail::mode_b_residual(alpha, beta, family_reference<Real>(s, n, ctx).ref_roots));
        };
        const auto [g, _] = detail::golden_section(f, detail::kGapLo, detail::kGapHi);
        FamilySpec s = spec;
        s.gap_ratio = g;
        return detail::mode_b_residual(alpha, beta, family_reference<Real>(s, n, ctx).ref_roots);
    }
    return detail::mode_b_residual(alpha, beta, family_reference<Real>(spec, n, ctx).ref_roots);
}

// ---------------------------------------------------------------------------
// Symmetry classes

/// Reflection defect (1/sqrt(n)) ||r + rev(r)||: zero iff r is symmetric about 0.
template <class Real>
Real reflection_defect(std::span<const Real> r) {
    using std::sqrt;
    Real s(0);
    const std::size_t n = r.size();
    for (std::size_t i = 0; i < n; ++i) s += (r[i] + r[n - 1 - i]) * (r[i] + r[n - 1 - i]);
    return sqrt(s / Real(static_cast<double>(n)));
}

/// Largest normalized odd power sum |sum r^k| / sum |r|^k over odd k in
/// [3, max(3, n)]; zero iff the polynomial is even or odd.
template <class Real>
Real odd_moment_defect(std::span<const Real> r) {
    using std::abs;
    const std::size_t kmax = std::max<std::size_t>(3, r.size());
    Real worst(0);
    for (std::size_t k = 3; k <= kmax; k += 2) {
        Real num(0), den(0);
        for (const auto& x : r) {
            Real xk(1);
            for (std::size_t e = 0; e < k; ++e) xk *= x;
            num += xk;
            den += abs(xk);
        }
        if (den > Real(0)) worst = std::max(worst, Real(abs(num) / den));
    }
    return worst;
}

template <class Real>
struct SymmetryScores {
    Real s1_alpha{}, s1_beta{};
    Real s2_alpha{}, s2_beta{};
    Real s3{};  // d_PQ
    Real s4{};  // (1/sqrt(n)) ||alpha + rev(beta)||
};

template <class Real>
SymmetryScores<Real> symmetry_scores(const RootConfig<Real>& alpha, const RootConfig<Real>& beta) {
    SymmetryScores<Real> s;
    s.s1_alpha = reflection_defect(alpha.roots());
    s.s1_beta = reflection_defect(beta.roots());
    s.s2_alpha = odd_moment_defect(alpha.roots());
    s.s2_beta = odd_moment_defect(beta.roots());
    s.s3 = rms_distance(alpha.roots(), beta.roots());
    const auto rb = reversed(beta.roots());
    std::vector<Real> sum(alpha.values());
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += rb[i];
    std::vector<Real> zero(sum.size(), Real(0));
    s.s4 = rms_distance<Real>(sum, zero);
    return s;
}

struct SymmetryFlags {
    bool s1_alpha = false, s1_beta = false;
    bool s2_alpha = false, s2_beta = false;
    bool s3 = false;
    bool s4 = false;
};

/// S1: reflection symmetry per polynomial. S2: vanishing odd moments per
/// polynomial. S3: alpha close to beta. S4: alpha close to -rev(beta).
/// Inputs are expected to be normalized.
template <class Real>
SymmetryFlags classify_symmetries(const RootConfig<Real>& alpha, const RootConfig<Real>& beta, double t) {
    const auto s = symmetry_scores(alpha, beta);
    const Real tt(t);
    return {s.s1_alpha < tt, s.s1_beta < tt, s.s2_alpha < tt, s.s2_beta < tt, s.s3 < tt, s.s4 < tt};
}

}  // namespace ffstam
