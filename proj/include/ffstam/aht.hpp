#pragma once

// Screening of elite populations against the family library: e-values from
// win counts against the Hermite baseline, and per-population summaries.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/special_functions/beta.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "ffstam/errors.hpp"
#include "ffstam/reference.hpp"
#include "ffstam/search.hpp"

namespace ffstam {

/// Emitted with every screening report.
inline constexpr const char* kEliteCaveat = "optimizer-selected rather than exchangeable";

inline constexpr double kRejectThreshold = 20.0;
inline constexpr double kTieTolerance = 1e-12;
inline constexpr std::size_t kDefaultScreenSize = 512;

/// Natural log of 2^{m+1} int_{1/2}^1 q^w (1-q)^{m-w} dq.
///
/// The integral is B(w+1, m-w+1) times the upper regularized incomplete beta
/// at 1/2. Up to m = 1000 both factors fit in a double and are combined as
/// logs; beyond that they are taken in a binary float with a wide exponent.
inline double log_evalue(long long wins, long long m_eff) {
    if (m_eff < 0 || wins < 0 || wins > m_eff) {
        throw InvalidCounts("evalue: need 0 <= wins <= m_eff (wins=" + std::to_string(wins) +
                            ", m_eff=" + std::to_string(m_eff) + ")");
    }
    const double ln2 = std::log(2.0);
    if (m_eff <= 1000) {
        const double a = static_cast<double>(wins + 1), b = static_cast<double>(m_eff - wins + 1);
        const double lbeta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
        return static_cast<double>(m_eff + 1) * ln2 + lbeta + std::log(boost::math::ibetac(a, b, 0.5));
    }
    using F = boost::multiprecision::cpp_bin_float_50;
    const F a(wins + 1), b(m_eff - wins + 1);
    const F integral = boost::math::beta(a, b) * boost::math::ibetac(a, b, F(0.5));
    return static_cast<double>(F(m_eff + 1) * boost::multiprecision::log(F(2)) + boost::multiprecision::log(integral));
}

/// The e-value itself. Overflows to +inf only past about 1e308.
inline double evalue(long long wins, long long m_eff) { return std::exp(log_evalue(wins, m_eff)); }

enum class Decision { Reject_H0, NoReject };
enum class Favoured { Family, Hermite, Inconclusive };

inline std::string to_string(Decision d) { return d == Decision::Reject_H0 ? "Reject_H0" : "NoReject"; }
inline std::string to_string(Favoured f) {
    switch (f) {
        case Favoured::Family: return "Family";
        case Favoured::Hermite: return "Hermite";
        case Favoured::Inconclusive: return "Inconclusive";
    }
    return "?";
}

struct ScreenResult {
    std::size_t n = 0;
    double p = 0.0;
    FamilySpec family;
    double e_value = 0.0;
    double log10_e_value = 0.0;
    std::size_t m_eff = 0;
    std::size_t wins = 0;
    std::size_t ties = 0;
    Decision decision = Decision::NoReject;
    Favoured favoured = Favoured::Inconclusive;
};

namespace detail {

inline void require_elites(const std::vector<EliteEntry>& elites, const char* who) {
    if (elites.empty()) throw EmptyElites(std::string(who) + ": no elite entries");
}

inline std::vector<EliteEntry> top_entries(const std::vector<EliteEntry>& elites, std::size_t limit) {
    std::vector<EliteEntry> v(elites);
    std::stable_sort(v.begin(), v.end(), [](const auto& x, const auto& y) { return x.objective < y.objective; });
    if (limit > 0 && v.size() > limit) v.resize(limit);
    return v;
}

inline double mode_a(const EliteEntry& e, const FamilySpec& spec, const PrecisionContext& ctx) {
    return joint_residual(e.alpha, e.beta, spec, FitMode::A, ctx);
}

}  // namespace detail

/// Counts, over the best `limit` elites, how often the family's Mode A joint
/// residual beats Hermite's. Ties within 1e-12 are dropped from m_eff.
inline ScreenResult screen_family(const std::vector<EliteEntry>& elites, const FamilySpec& family, double p,
                                  std::size_t limit = kDefaultScreenSize) {
    detail::require_elites(elites, "screen_family");
    const auto ctx = PrecisionContext::with_digits(15);
    const auto top = detail::top_entries(elites, limit);
    ScreenResult r;
    r.n = top.front().alpha.degree();
    r.p = p;
    r.family = family;
    const FamilySpec hermite{Family::Hermite};
    for (const auto& e : top) {
        const double rf = detail::mode_a(e, family, ctx);
        const double rh = detail::mode_a(e, hermite, ctx);
        if (std::abs(rf - rh) <= kTieTolerance) {
            ++r.ties;
            continue;
        }
        ++r.m_eff;
        if (rf < rh) ++r.wins;
    }
    const double le = log_evalue(static_cast<long long>(r.wins), static_cast<long long>(r.m_eff));
    r.e_value = std::exp(le);
    r.log10_e_value = le / std::log(10.0);
    r.decision = r.e_value >= kRejectThreshold ? Decision::Reject_H0 : Decision::NoReject;
    if (r.decision == Decision::Reject_H0) r.favoured = Favoured::Family;
    else if (r.e_value < 1.0) r.favoured = Favoured::Hermite;
    else r.favoured = Favoured::Inconclusive;
    return r;
}

struct EliteSummary {
    std::size_t n = 0;
    std::size_t size = 0;
    FamilySpec best_family;
    double median_d_joint = 0.0;
    double consistency = 0.0;
    double best_d_PQ = 0.0;
    double best_D = 0.0;
    // (class, t) -> fraction. S1 and S2 count polynomials, S3 and S4 pairs.
    std::map<std::pair<std::string, double>, double> sym_fractions;
    // Median Mode A residual and argmin count of every library family.
    std::vector<std::pair<FamilySpec, double>> family_medians;
    std::vector<std::size_t> argmin_counts;
    std::string caveat = kEliteCaveat;
};

inline double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

/// Family that is the per-entry Mode A argmin most often, with its agreement
/// rate and median residual, the pair diagnostics of the best entry, and the
/// symmetry class frequencies at each threshold.
inline EliteSummary summarize_elites(const std::vector<EliteEntry>& elites, const std::vector<FamilySpec>& library,
                                     const std::vector<double>& t_list = {0.05, 0.1, 0.2},
                                     std::size_t limit = kDefaultScreenSize) {
    detail::require_elites(elites, "summarize_elites");
    if (library.empty()) throw InvalidArgument("summarize_elites: empty family library");
    const auto ctx = PrecisionContext::with_digits(15);
    const auto top = detail::top_entries(elites, limit);
    const std::size_t M = top.size(), L = library.size();

    std::vector<std::vector<double>> res(L, std::vector<double>(M));
    std::vector<std::size_t> wins(L, 0);
    for (std::size_t m = 0; m < M; ++m) {
        std::size_t arg = 0;
        for (std::size_t f = 0; f < L; ++f) {
            res[f][m] = detail::mode_a(top[m], library[f], ctx);
            if (res[f][m] < res[arg][m]) arg = f;
        }
        ++wins[arg];
    }
    const std::size_t best = static_cast<std::size_t>(std::max_element(wins.begin(), wins.end()) - wins.begin());

    EliteSummary s;
    s.n = top.front().alpha.degree();
    s.size = M;
    s.best_family = library[best];
    s.consistency = static_cast<double>(wins[best]) / static_cast<double>(M);
    s.median_d_joint = median_of(res[best]);
    s.argmin_counts = wins;
    for (std::size_t f = 0; f < L; ++f) s.family_medians.emplace_back(library[f], median_of(res[f]));

    const auto lead = pair_diagnostics(normalize_shape(top.front().alpha), normalize_shape(top.front().beta));
    s.best_d_PQ = lead.d_PQ;
    s.best_D = lead.D;

    std::vector<SymmetryScores<double>> scores;
    for (const auto& e : top) scores.push_back(symmetry_scores(normalize_shape(e.alpha), normalize_shape(e.beta)));
    const double dm = static_cast<double>(M);
    for (double t : t_list) {
        std::size_t c1 = 0, c2 = 0, c3 = 0, c4 = 0;
        for (const auto& sc : scores) {
            c1 += (sc.s1_alpha < t) + (sc.s1_beta < t);
            c2 += (sc.s2_alpha < t) + (sc.s2_beta < t);
            c3 += sc.s3 < t;
            c4 += sc.s4 < t;
        }
        s.sym_fractions[{"S1", t}] = static_cast<double>(c1) / (2 * dm);
        s.sym_fractions[{"S2", t}] = static_cast<double>(c2) / (2 * dm);
        s.sym_fractions[{"S3", t}] = static_cast<double>(c3) / dm;
        s.sym_fractions[{"S4", t}] = static_cast<double>(c4) / dm;
    }
    return s;
}

/// max adjacent gap / median of the other adjacent gaps.
template <class Real>
double gap_statistic(const RootConfig<Real>& r) {
    if (r.degree() < 3) throw InvalidArgument("gap_statistic: need n >= 3");
    std::vector<double> gaps;
    for (std::size_t i = 1; i < r.degree(); ++i) gaps.push_back(to_double(Real(r[i] - r[i - 1])));
    const auto mx = std::max_element(gaps.begin(), gaps.end());
    const double top = *mx;
    gaps.erase(mx);
    return top / median_of(std::move(gaps));
}

/// Linear-interpolation quantile of sorted data.
inline double quantile_sorted(const std::vector<double>& v, double q) {
    if (v.empty()) return 0.0;
    const double pos = q * static_cast<double>(v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

struct OrderBand {
    std::size_t index = 0;  // 1-based root index
    double q10 = 0, q25 = 0, q50 = 0, q75 = 0, q90 = 0;
};

/// Per-index quantiles of the normalized sorted roots, pooling both members
/// of every elite pair.
inline std::vector<OrderBand> order_statistic_bands(const std::vector<EliteEntry>& elites,
                                                    std::size_t limit = kDefaultScreenSize) {
    detail::require_elites(elites, "order_statistic_bands");
    const auto top = detail::top_entries(elites, limit);
    const std::size_t n = top.front().alpha.degree();
    std::vector<std::vector<double>> cols(n);
    for (const auto& e : top) {
        for (const auto* r : {&e.alpha, &e.beta}) {
            const auto z = normalize_shape(*r);
            for (std::size_t i = 0; i < n; ++i) cols[i].push_back(z[i]);
        }
    }
    std::vector<OrderBand> out;
    for (std::size_t i = 0; i < n; ++i) {
        std::sort(cols[i].begin(), cols[i].end());
        out.push_back({i + 1, quantile_sorted(cols[i], 0.10), quantile_sorted(cols[i], 0.25),
                       quantile_sorted(cols[i], 0.50), quantile_sorted(cols[i], 0.75),
                       quantile_sorted(cols[i], 0.90)});
    }
    return out;
}

}  // namespace ffstam
