#pragma once

// Derivative-free extremal search over pairs of root configurations:
// projected random perturbation with symmetry moves and restarts, a top-K
// elite buffer, closed-loop reseeding rounds, and (n, p) grid sweeps.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ffstam/errors.hpp"
#include "ffstam/fisher_stam.hpp"
#include "ffstam/precision.hpp"
#include "ffstam/realroot.hpp"
#include "ffstam/reference.hpp"

namespace ffstam {

enum class Objective { g_p, rho_p };
enum class Gauge { free, normalized };

inline std::string to_string(Objective o) { return o == Objective::g_p ? "g_p" : "rho_p"; }
inline std::string to_string(Gauge g) { return g == Gauge::free ? "free" : "normalized"; }

inline Objective parse_objective(const std::string& s) {
    if (s == "g_p" || s == "g") return Objective::g_p;
    if (s == "rho_p" || s == "rho") return Objective::rho_p;
    throw InvalidArgument("unknown objective '" + s + "' (expected g_p or rho_p)");
}

inline Gauge parse_gauge(const std::string& s) {
    if (s == "free") return Gauge::free;
    if (s == "normalized") return Gauge::normalized;
    throw InvalidArgument("unknown gauge '" + s + "' (expected free or normalized)");
}

struct SearchConfig {
    std::size_t n = 6;
    double p = 2.0;
    Objective objective = Objective::g_p;
    int restarts = 32;
    int rounds = 4;
    int steps_per_restart = 1500;
    double init_step = 0.3;
    double step_decay = 0.9;
    double min_gap = 1e-4;
    // When positive, overrides min_gap with this fraction of the spacing of
    // n equispaced unit-variance roots, sqrt(12 / (n^2 - 1)).
    double min_gap_relative = 0.0;
    int top_k = 64;
    std::uint64_t seed = 1;
    Gauge gauge = Gauge::normalized;
    // Random-direction refinement appended to every restart.
    int refine_steps = 300;
    double symmetry_prob = 0.25;
    // Initial step of reseeded rounds, relative to init_step.
    double reseed_step_scale = 0.25;

    void validate() const {
        if (n < 2) throw InvalidArgument("SearchConfig: n must be >= 2");
        if (!(p > 1.0)) throw InvalidArgument("SearchConfig: p must exceed 1");
        if (restarts < 1) throw InvalidArgument("SearchConfig: restarts must be >= 1");
        if (rounds < 1) throw InvalidArgument("SearchConfig: rounds must be >= 1");
        if (steps_per_restart < 0 || refine_steps < 0) throw InvalidArgument("SearchConfig: negative step count");
        if (!(init_step > 0.0)) throw InvalidArgument("SearchConfig: init_step must be positive");
        if (!(step_decay > 0.0 && step_decay < 1.0)) throw InvalidArgument("SearchConfig: step_decay must lie in (0,1)");
        if (!(min_gap > 0.0)) throw InvalidArgument("SearchConfig: min_gap must be positive");
        if (!(min_gap_relative >= 0.0 && min_gap_relative < 1.0)) {
            throw InvalidArgument("SearchConfig: min_gap_relative must lie in [0,1)");
        }
        if (top_k < 1) throw InvalidArgument("SearchConfig: top_k must be >= 1");
        if (!(symmetry_prob >= 0.0 && symmetry_prob <= 1.0)) {
            throw InvalidArgument("SearchConfig: symmetry_prob must lie in [0,1]");
        }
        if (!(reseed_step_scale > 0.0)) throw InvalidArgument("SearchConfig: reseed_step_scale must be positive");
    }

    double effective_min_gap() const {
        if (min_gap_relative > 0.0) {
            const double nn = static_cast<double>(n);
            return min_gap_relative * std::sqrt(12.0 / (nn * nn - 1.0));
        }
        return min_gap;
    }
};

struct EliteEntry {
    RootConfig<double> alpha;
    RootConfig<double> beta;
    double objective = 0.0;
    double g_p = 0.0;
    double rho_p = 0.0;
    PairDiagnostics<double> diag;
};

/// Top-K pairs sorted ascending by objective. Entries that repeat an existing
/// pair (or its swap) within 1e-9 rms are merged, keeping the better value.
class EliteBuffer {
public:
    explicit EliteBuffer(std::size_t capacity = 64) : capacity_(capacity) {}

    std::size_t capacity() const noexcept { return capacity_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    const std::vector<EliteEntry>& entries() const noexcept { return entries_; }
    const EliteEntry& best() const {
        if (entries_.empty()) throw EmptyElites("EliteBuffer: empty");
        return entries_.front();
    }

    void offer(const EliteEntry& e) {
        if (!std::isfinite(e.objective)) return;
        for (auto it = entries_.begin(); it != entries_.end(); ++it) {
            if (same_pair(*it, e)) {
                if (e.objective < it->objective) {
                    entries_.erase(it);
                    break;
                }
                return;
            }
        }
        const auto pos = std::upper_bound(entries_.begin(), entries_.end(), e.objective,
                                          [](double v, const EliteEntry& x) { return v < x.objective; });
        entries_.insert(pos, e);
        if (entries_.size() > capacity_) entries_.resize(capacity_);
    }

    void merge(const EliteBuffer& other) {
        for (const auto& e : other.entries_) offer(e);
    }

private:
    static bool close(const RootConfig<double>& a, const RootConfig<double>& b) {
        return a.degree() == b.degree() && rms_distance(a.roots(), b.roots()) < 1e-9;
    }
    static bool same_pair(const EliteEntry& x, const EliteEntry& y) {
        return (close(x.alpha, y.alpha) && close(x.beta, y.beta)) || (close(x.alpha, y.beta) && close(x.beta, y.alpha));
    }

    std::size_t capacity_;
    std::vector<EliteEntry> entries_;
};

namespace detail {

/// L2 projection of x onto {x_{i+1} - x_i >= g}: isotonic regression (pool
/// adjacent violators) of x_i - i g, shifted back.
inline std::vector<double> project_gaps(std::vector<double> x, double g) {
    std::sort(x.begin(), x.end());
    const std::size_t n = x.size();
    bool ok = true;
    for (std::size_t i = 1; i < n; ++i) ok = ok && (x[i] - x[i - 1] >= g);
    if (ok) return x;
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] - static_cast<double>(i) * g;
    std::vector<double> level;
    std::vector<std::size_t> count;
    for (std::size_t i = 0; i < n; ++i) {
        level.push_back(y[i]);
        count.push_back(1);
        while (level.size() > 1 && level[level.size() - 2] > level.back()) {
            const double c1 = static_cast<double>(count[count.size() - 2]);
            const double c2 = static_cast<double>(count.back());
            const double merged = (level[level.size() - 2] * c1 + level.back() * c2) / (c1 + c2);
            count[count.size() - 2] += count.back();
            level[level.size() - 2] = merged;
            level.pop_back();
            count.pop_back();
        }
    }
    std::size_t i = 0;
    for (std::size_t b = 0; b < level.size(); ++b)
        for (std::size_t c = 0; c < count[b]; ++c, ++i) x[i] = level[b] + static_cast<double>(i) * g;
    return x;
}

inline double min_gap_of(const std::vector<double>& x) {
    double g = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < x.size(); ++i) g = std::min(g, x[i] - x[i - 1]);
    return g;
}

inline std::vector<double> normalized(std::vector<double> x) {
    double m = 0.0;
    for (double v : x) m += v;
    m /= static_cast<double>(x.size());
    double var = 0.0;
    for (double v : x) var += (v - m) * (v - m);
    var /= static_cast<double>(x.size());
    if (!(var >= 1e-24)) throw ProjectionFailure("project_feasible: configuration collapsed to a point");
    const double s = std::sqrt(var);
    for (double& v : x) v = (v - m) / s;
    return x;
}

inline std::vector<double> project_one(std::vector<double> x, const SearchConfig& cfg) {
    for (double v : x)
        if (!std::isfinite(v)) throw ProjectionFailure("project_feasible: non-finite coordinate");
    const double g = cfg.effective_min_gap();
    x = project_gaps(std::move(x), g);
    if (cfg.gauge == Gauge::free) return x;
    const double tol = g * (1.0 - 1e-9);
    for (int it = 0; it < 10; ++it) {
        x = normalized(std::move(x));
        if (min_gap_of(x) >= tol) return x;
        x = project_gaps(std::move(x), g);
    }
    throw ProjectionFailure("project_feasible: no fixed point of gap enforcement and normalization within 10 "
                            "iterations (min_gap too large for unit variance at n=" +
                            std::to_string(x.size()) + ")");
}

}  // namespace detail

/// Sorts, enforces the minimum gap, and in the normalized gauge alternates
/// normalization with gap enforcement until both hold.
inline std::pair<RootConfig<double>, RootConfig<double>> project_feasible(std::vector<double> alpha,
                                                                          std::vector<double> beta,
                                                                          const SearchConfig& cfg) {
    if (alpha.size() != cfg.n || beta.size() != cfg.n) throw DegreeMismatch("project_feasible: wrong length");
    return {RootConfig<double>(detail::project_one(std::move(alpha), cfg)),
            RootConfig<double>(detail::project_one(std::move(beta), cfg))};
}

/// True when projection would leave the pair unchanged.
inline bool is_feasible(const RootConfig<double>& r, const SearchConfig& cfg) {
    if (r.degree() != cfg.n) return false;
    if (r.degree() >= 2 && !(r.min_gap() >= cfg.effective_min_gap() * (1.0 - 1e-9))) return false;
    if (cfg.gauge == Gauge::normalized) {
        if (std::abs(mean_of(r.roots())) > 1e-9 || std::abs(variance_of(r.roots()) - 1.0) > 1e-9) return false;
    }
    return true;
}

/// Deficit report for a pair at the precision of Real.
template <class Real>
DeficitReport<Real> evaluate_pair(const RootConfig<double>& alpha, const RootConfig<double>& beta, double p) {
    const auto ctx = PrecisionContext::with_digits(std::max(digits_of<Real>(), 15));
    return stam_deficit(convert<Real>(alpha), convert<Real>(beta), Real(p), ctx);
}

/// Oracle used by the search: the objective in double, or nullopt when the
/// oracle fails on this pair.
inline std::optional<EliteEntry> evaluate_entry(const RootConfig<double>& alpha, const RootConfig<double>& beta,
                                                const SearchConfig& cfg) {
    try {
        const auto rep = evaluate_pair<double>(alpha, beta, cfg.p);
        EliteEntry e{alpha, beta, 0.0, rep.g_p, rep.rho_p, {}};
        e.objective = cfg.objective == Objective::g_p ? rep.g_p : rep.rho_p;
        if (!std::isfinite(e.objective)) return std::nullopt;
        return e;
    } catch (const Error&) {
        return std::nullopt;
    }
}

struct SearchStats {
    std::size_t evaluations = 0;
    std::size_t failures = 0;  // oracle or projection errors; samples discarded
    std::size_t accepted = 0;
};

struct RoundResult {
    EliteBuffer buffer;
    SearchStats stats;
};

namespace detail {

/// Per-restart RNG stream from (seed, round, restart).
inline std::mt19937_64 restart_rng(std::uint64_t seed, int round, int restart) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(round), static_cast<std::uint32_t>(restart)};
    return std::mt19937_64(seq);
}

inline std::vector<double> reflect(const RootConfig<double>& r) {
    std::vector<double> out;
    out.reserve(r.degree());
    for (auto it = r.values().rbegin(); it != r.values().rend(); ++it) out.push_back(-*it);
    return out;
}

inline void finish_entry(EliteEntry& e) {
    if (e.alpha.degree() >= 2) e.diag = pair_diagnostics(normalize_shape(e.alpha), normalize_shape(e.beta));
}

}  // namespace detail

/// One SRP round: `cfg.restarts` projected random-perturbation descents,
/// each initialized round-robin from `seed_pool` when it is nonempty and from
/// a random feasible pair otherwise. Every accepted state is offered to the
/// round's top-K buffer.
inline RoundResult srp_search(const SearchConfig& cfg, const EliteBuffer& seed_pool, int round = 0) {
    cfg.validate();
    RoundResult out{EliteBuffer(static_cast<std::size_t>(cfg.top_k)), {}};
    const std::size_t n = cfg.n;
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    for (int restart = 0; restart < cfg.restarts; ++restart) {
        auto rng = detail::restart_rng(cfg.seed, round, restart);
        std::optional<EliteEntry> cur;
        double step = cfg.init_step;
        if (!seed_pool.empty()) {
            cur = seed_pool.entries()[static_cast<std::size_t>(restart) % seed_pool.size()];
            step = cfg.init_step * cfg.reseed_step_scale;
        }
        for (int attempt = 0; !cur && attempt < 100; ++attempt) {
            std::vector<double> a(n), b(n);
            for (auto& v : a) v = normal(rng);
            for (auto& v : b) v = normal(rng);
            try {
                auto [pa, pb] = project_feasible(std::move(a), std::move(b), cfg);
                ++out.stats.evaluations;
                cur = evaluate_entry(pa, pb, cfg);
                if (!cur) ++out.stats.failures;
            } catch (const Error&) {
                ++out.stats.failures;
            }
        }
        if (!cur) continue;

        auto try_move = [&](std::vector<double> a, std::vector<double> b) {
            try {
                auto [pa, pb] = project_feasible(std::move(a), std::move(b), cfg);
                ++out.stats.evaluations;
                auto cand = evaluate_entry(pa, pb, cfg);
                if (!cand) {
                    ++out.stats.failures;
                    return false;
                }
                if (cand->objective < cur->objective) {
                    cur = std::move(cand);
                    ++out.stats.accepted;
                    if (out.buffer.size() < out.buffer.capacity() ||
                        cur->objective < out.buffer.entries().back().objective) {
                        detail::finish_entry(*cur);
                        out.buffer.offer(*cur);
                    }
                    return true;
                }
            } catch (const Error&) {
                ++out.stats.failures;
            }
            return false;
        };

        int streak = 0;
        for (int it = 0; it < cfg.steps_per_restart; ++it) {
            std::vector<double> a(cur->alpha.values()), b(cur->beta.values());
            for (auto& v : a) v += step * normal(rng);
            for (auto& v : b) v += step * normal(rng);
            if (unif(rng) < cfg.symmetry_prob) {
                const int move = static_cast<int>(unif(rng) * 3.0);
                if (move == 0) {
                    std::swap(a, b);
                } else if (move == 1) {
                    auto& target = unif(rng) < 0.5 ? a : b;
                    std::reverse(target.begin(), target.end());
                    for (auto& v : target) v = -v;
                } else {
                    b = a;
                }
            }
            if (try_move(std::move(a), std::move(b))) {
                streak = 0;
            } else if (++streak >= 10) {
                step *= cfg.step_decay;
                streak = 0;
            }
            step = std::max(step, 1e-12);
        }

        // Random-direction refinement with step reduction.
        double rstep = std::max(step, 1e-6);
        for (int it = 0; it < cfg.refine_steps; ++it) {
            std::vector<double> d(2 * n);
            double norm = 0.0;
            for (auto& v : d) {
                v = normal(rng);
                norm += v * v;
            }
            norm = std::sqrt(norm);
            bool improved = false;
            for (double sign : {1.0, -1.0}) {
                std::vector<double> a(cur->alpha.values()), b(cur->beta.values());
                for (std::size_t i = 0; i < n; ++i) {
                    a[i] += sign * rstep * d[i] / norm;
                    b[i] += sign * rstep * d[n + i] / norm;
                }
                if (try_move(std::move(a), std::move(b))) {
                    improved = true;
                    break;
                }
            }
            if (!improved) rstep = std::max(rstep * 0.8, 1e-12);
        }

        detail::finish_entry(*cur);
        out.buffer.offer(*cur);
    }
    return out;
}

struct ClosedLoopResult {
    EliteBuffer buffer;
    std::vector<double> best_per_round;
    SearchStats stats;
};

/// `cfg.rounds` SRP rounds, each seeded from the buffer of the previous one.
/// The buffer carries over, so the best value never increases across rounds.
inline ClosedLoopResult closed_loop_run(const SearchConfig& cfg) {
    cfg.validate();
    ClosedLoopResult out{EliteBuffer(static_cast<std::size_t>(cfg.top_k)), {}, {}};
    for (int round = 0; round < cfg.rounds; ++round) {
        const EliteBuffer pool = out.buffer;
        auto res = srp_search(cfg, pool, round);
        out.buffer.merge(res.buffer);
        out.stats.evaluations += res.stats.evaluations;
        out.stats.failures += res.stats.failures;
        out.stats.accepted += res.stats.accepted;
        out.best_per_round.push_back(out.buffer.empty() ? std::numeric_limits<double>::infinity()
                                                        : out.buffer.best().objective);
    }
    return out;
}

struct SweepCell {
    std::size_t n = 0;
    double p = 0.0;
    bool ok = false;
    std::string error;  // category name when the cell failed
    double min_objective = 0.0;
    double g_p_min = 0.0;      // best entry, double oracle
    double g_p_min_hp = 0.0;   // best entry re-evaluated at 50 digits
    double rho_p_min = 0.0;
    double heat = 0.0;         // sgn(g) log10(1 + |g|) of the 50-digit value
    bool sign_confirmed = true;  // double and 50-digit values agree in sign
    PairDiagnostics<double> diag;
    EliteBuffer elites;
    SearchStats stats;
};

/// sgn(g) log10(1 + |g|).
inline double heat_value(double g) {
    if (g == 0.0) return 0.0;
    return std::copysign(std::log1p(std::abs(g)) / std::log(10.0), g);
}

/// Runs closed_loop_run on every (n, p) cell with the other settings taken
/// from `tmpl`. The best pair of each cell is re-evaluated at 50 digits.
/// Failed cells are recorded and the sweep continues.
inline std::vector<SweepCell> sweep(const std::vector<std::pair<std::size_t, double>>& grid, const SearchConfig& tmpl) {
    if (grid.empty()) throw InvalidArgument("sweep: empty grid");
    std::vector<SweepCell> cells;
    for (const auto& [n, p] : grid) {
        SweepCell cell;
        cell.n = n;
        cell.p = p;
        try {
            SearchConfig cfg = tmpl;
            cfg.n = n;
            cfg.p = p;
            auto res = closed_loop_run(cfg);
            cell.stats = res.stats;
            if (res.buffer.empty()) throw EmptyElites("sweep: no feasible sample evaluated");
            const auto& best = res.buffer.best();
            cell.min_objective = best.objective;
            cell.g_p_min = best.g_p;
            cell.rho_p_min = best.rho_p;
            cell.diag = best.diag;
            cell.g_p_min_hp = to_double(evaluate_pair<mpfr_real<50>>(best.alpha, best.beta, p).g_p);
            cell.sign_confirmed = std::signbit(cell.g_p_min_hp) == std::signbit(cell.g_p_min);
            cell.heat = heat_value(cell.g_p_min_hp);
            cell.elites = std::move(res.buffer);
            cell.ok = true;
        } catch (const Error& e) {
            cell.error = std::string(category_name(e.category()));
        }
        cells.push_back(std::move(cell));
    }
    return cells;
}

}  // namespace ffstam
